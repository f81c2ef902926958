#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hubrl::harness {

// One training or evaluation episode as logged.
struct EpisodeRecord {
  int episode = 0;
  int steps = 0;
  double ret = 0.0;                   // sum of rewards
  std::optional<double> final_error;  // arm goal tasks: degrees off at the last step
  double wall_seconds = 0.0;
};

// Writes `episode,steps,return,final_error,wall_seconds` rows; doubles are
// printed with enough digits to round-trip exactly, a missing final_error is
// an empty cell. Every row is newline-terminated.
void log_csv(const std::vector<EpisodeRecord>& records, const std::string& path);
std::vector<EpisodeRecord> parse_csv(const std::string& path);

// Renders one SVG line chart per metric (return, steps, and final_error when
// any run logged it) into out_dir: per-episode values smoothed with a
// trailing moving average of window 5, the cross-run mean as the line and
// the min/max envelope as a band (band omitted for a single run). Reads
// <dir>/train.csv from each run dir; throws MissingLogsError when none has
// one. Returns the written file paths.
std::vector<std::string> plot(const std::vector<std::string>& run_dirs,
                              const std::string& out_dir);

}  // namespace hubrl::harness
