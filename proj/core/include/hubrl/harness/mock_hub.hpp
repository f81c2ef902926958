#pragma once

#include <memory>
#include <string>
#include <sys/types.h>
#include <thread>

#include "hubrl/wire/hub.hpp"
#include "hubrl/wire/transport.hpp"

namespace hubrl::harness {

struct HubOptions {
  double step_delay_s = 0.0;  // robot motion time per exchange
  bool noise = true;          // dynamics disturbance on the hub side
  std::uint64_t seed = 0;
};

// The hub program (frame dims + mock robot dynamics) matching a registered
// environment name. Throws UnknownEnvError for anything unregistered.
wire::HubProgram mock_hub_program(const std::string& env_name, const HubOptions& opts = {});

// A mock hub serving on a background thread over an in-process duplex pipe.
// take_transport() hands out the environment-side endpoint (once); close()
// shuts the hub down and joins the thread, and is safe to call while the
// environment endpoint is still alive.
class HubHandle {
 public:
  HubHandle(std::unique_ptr<wire::Transport> env_side, std::shared_ptr<wire::Transport> hub_side,
            std::thread worker, std::shared_ptr<long> served);
  ~HubHandle();

  HubHandle(const HubHandle&) = delete;
  HubHandle& operator=(const HubHandle&) = delete;

  std::unique_ptr<wire::Transport> take_transport();
  long exchanges_served() const;  // valid after close()
  void close();

 private:
  std::unique_ptr<wire::Transport> env_side_;
  std::shared_ptr<wire::Transport> hub_side_;
  std::thread worker_;
  std::shared_ptr<long> served_;
  bool closed_ = false;
};

std::unique_ptr<HubHandle> spawn_mock_hub(const std::string& env_name, const HubOptions& opts = {});

// Same hub as a child process running `<cli> hub --env <name>` with the wire
// on its stdin/stdout. Destroy/close only after the environment-side
// transport has been released, since the child exits on end-of-stream.
class HubProcess {
 public:
  HubProcess(pid_t pid, std::unique_ptr<wire::Transport> env_side);
  ~HubProcess();

  HubProcess(const HubProcess&) = delete;
  HubProcess& operator=(const HubProcess&) = delete;

  std::unique_ptr<wire::Transport> take_transport();
  int wait();  // reaps the child, returns its exit code; idempotent

 private:
  pid_t pid_;
  std::unique_ptr<wire::Transport> env_side_;
  int exit_code_ = -1;
  bool reaped_ = false;
};

std::unique_ptr<HubProcess> spawn_hub_process(const std::string& cli_path,
                                              const std::string& env_name,
                                              const HubOptions& opts = {});

}  // namespace hubrl::harness
