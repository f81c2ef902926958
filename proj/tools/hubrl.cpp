#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "hubrl/envs/env.hpp"
#include "hubrl/harness/logging.hpp"
#include "hubrl/harness/mock_hub.hpp"
#include "hubrl/harness/run_config.hpp"
#include "hubrl/harness/trainer.hpp"
#include "hubrl/wire/hub.hpp"
#include "hubrl/wire/transport.hpp"

namespace {

using namespace hubrl;

struct CommonFlags {
  std::string env, agent, config, out;
  int episodes = -1;
  std::string seed;
};

harness::RunConfig resolve_config(const CommonFlags& f) {
  harness::KvPairs file_pairs;
  if (!f.config.empty()) file_pairs = harness::load_config_file(f.config);
  harness::KvPairs cli;
  if (!f.env.empty()) cli.emplace_back("env", f.env);
  if (!f.agent.empty()) cli.emplace_back("agent", f.agent);
  if (f.episodes >= 0) cli.emplace_back("episodes", std::to_string(f.episodes));
  if (!f.seed.empty()) cli.emplace_back("seed", f.seed);
  if (!f.out.empty()) cli.emplace_back("out", f.out);
  harness::RunConfig rc = harness::build_run_config(file_pairs, cli);
  if (rc.env.empty()) throw ConfigError("--env (or an env= config entry) is required");
  return rc;
}

int run_train(const CommonFlags& f) {
  const harness::RunConfig rc = resolve_config(f);
  const harness::TrainResult tr = harness::train(rc);
  double tail = 0.0;
  int n = 0;
  for (auto it = tr.records.rbegin(); it != tr.records.rend() && n < 5; ++it, ++n)
    tail += it->ret;
  std::printf("trained %s on %s: %d episodes, run dir %s, last-5 mean return %.4f\n",
              rc.agent.c_str(), rc.env.c_str(), static_cast<int>(tr.records.size()),
              tr.run_dir.c_str(), n ? tail / n : 0.0);
  return 0;
}

int run_eval(const std::string& checkpoint, const CommonFlags& f, int episodes, int seeds) {
  if (f.env.empty()) throw ConfigError("--env is required");
  std::uint64_t base_seed = 1000;
  if (!f.seed.empty()) base_seed = std::stoull(f.seed);
  const harness::EvalResult res =
      harness::evaluate(checkpoint, f.env, episodes, seeds, base_seed);
  if (!f.out.empty()) {
    std::filesystem::create_directories(f.out);
    harness::log_csv(res.records, f.out + "/eval.csv");
  }
  std::printf("mean_return=%.6f stddev=%.6f success_rate=%.4f mean_steps=%.2f episodes=%d\n",
              res.mean_return, res.stddev_return, res.success_rate, res.mean_steps, res.episodes);
  return 0;
}

int run_plot(const std::vector<std::string>& dirs, const std::string& out) {
  for (const auto& p : harness::plot(dirs, out)) std::printf("%s\n", p.c_str());
  return 0;
}

int run_hub(const std::string& env, double delay, std::uint64_t seed, bool no_noise) {
  harness::HubOptions opts;
  opts.step_delay_s = delay;
  opts.noise = !no_noise;
  opts.seed = seed;
  const wire::HubProgram prog = harness::mock_hub_program(env, opts);
  // the wire is stdin/stdout; progress goes to stderr only
  auto transport = wire::make_fd_transport(0, 1);
  const long served = wire::run_hub_program(prog, *transport);
  std::fprintf(stderr, "hub for %s served %ld exchanges\n", env.c_str(), served);
  return 0;
}

int run_freq(const std::string& env, double delay, int count) {
  auto hub = harness::spawn_mock_hub(env, harness::HubOptions{delay, true, 0});
  auto transport = hub->take_transport();
  const envs::EnvDescriptor desc = envs::descriptor_for(env);
  const double hz = wire::measure_frequency(*transport, static_cast<std::size_t>(desc.action_dim),
                                            static_cast<std::size_t>(desc.hub_state_dim),
                                            static_cast<std::size_t>(count));
  std::printf("%.3f Hz over %d exchanges (step delay %.3g s)\n", hz, count, delay);
  transport->close();
  hub->close();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"train, evaluate and inspect hub-driven robot tasks"};
  app.require_subcommand(1);

  CommonFlags tf;
  auto* train = app.add_subcommand("train", "train an agent on an environment");
  train->add_option("--env", tf.env, "environment name");
  train->add_option("--agent", tf.agent, "td3 | sac | droq | random");
  train->add_option("--episodes", tf.episodes, "training episodes after prefill");
  train->add_option("--seed", tf.seed, "run seed");
  train->add_option("--config", tf.config, "key = value config file");
  train->add_option("--out", tf.out, "run output directory");

  CommonFlags ef;
  std::string checkpoint;
  int eval_episodes = 5, eval_seeds = 5;
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  eval->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  eval->add_option("--env", ef.env, "environment name");
  eval->add_option("--episodes", eval_episodes, "episodes per seed");
  eval->add_option("--seeds", eval_seeds, "number of evaluation seeds");
  eval->add_option("--seed", ef.seed, "base evaluation seed");
  eval->add_option("--out", ef.out, "directory for eval.csv");

  std::vector<std::string> plot_dirs;
  std::string plot_out;
  auto* plot = app.add_subcommand("plot", "render training curves as SVG");
  plot->add_option("dirs", plot_dirs, "run directories")->required();
  plot->add_option("--out", plot_out, "output directory")->required();

  std::string hub_env;
  double hub_delay = 0.0;
  std::uint64_t hub_seed = 0;
  bool hub_no_noise = false;
  auto* hub = app.add_subcommand("hub", "serve a mock hub on stdin/stdout");
  hub->add_option("--env", hub_env, "environment name")->required();
  hub->add_option("--delay", hub_delay, "per-exchange motion delay, seconds");
  hub->add_option("--seed", hub_seed, "hub dynamics seed");
  hub->add_flag("--no-noise", hub_no_noise, "disable dynamics noise");

  std::string freq_env;
  double freq_delay = 0.5;
  int freq_count = 20;
  auto* freq = app.add_subcommand("freq", "measure the exchange frequency of a mock hub");
  freq->add_option("--env", freq_env, "environment name")->required();
  freq->add_option("--delay", freq_delay, "per-exchange motion delay, seconds");
  freq->add_option("--count", freq_count, "number of exchanges to time");

  try {
    app.parse(argc, argv);
    if (*train) return run_train(tf);
    if (*eval) return run_eval(checkpoint, ef, eval_episodes, eval_seeds);
    if (*plot) return run_plot(plot_dirs, plot_out);
    if (*hub) return run_hub(hub_env, hub_delay, hub_seed, hub_no_noise);
    if (*freq) return run_freq(freq_env, freq_delay, freq_count);
    throw ConfigError("no subcommand given");
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const hubrl::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
