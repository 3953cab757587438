#ifndef QMD_CONFIG_HPP
#define QMD_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmd/dobrushin.hpp"
#include "qmd/mps.hpp"
#include "qmd/process.hpp"

namespace qmd {

// Validation failure carrying a JSON-pointer-style path to the offending
// field, e.g. "/schedule/matrices/0/rows/1".
struct ConfigError : std::runtime_error {
  ConfigError(std::string path_in, const std::string& message)
      : std::runtime_error(path_in + ": " + message), path(std::move(path_in)) {}
  std::string path;
};

// One self-describing JSON document per run; the command selects which
// optional members are populated.
struct RunConfig {
  std::string command;  // analyze-channel | simulate | mps | classical | report
  std::uint64_t seed = 0;
  int n_max = 1;
  int samples = 256;
  double threshold_r = 0.5;
  double epsilon = 5e-3;  // net resolution for analyze-channel
  bool nesting = false;
  std::string output;  // empty = stdout
  std::string format = "csv";

  std::optional<KrausChannel> channel;             // analyze-channel
  std::optional<ProcessSchedule> schedule;         // simulate / report
  std::vector<StochasticMatrix> classical_matrices;  // classical
  std::optional<MpsTensorTrain> train;             // mps
  std::optional<LocalObservable> observable;       // mps
};

RunConfig parse_config(const std::string& json_text);

// Executes the command and writes the report (config.output, resolved against
// the QMD_OUTPUT_DIR environment variable, or stdout). Returns the process
// exit code: 0 success, 1 validation error, 2 numerical failure.
int run(const RunConfig& config);

// Convenience wrapper: parse then run, mapping ConfigError to exit code 1.
int run_from_file(const std::string& path);

}  // namespace qmd

#endif
