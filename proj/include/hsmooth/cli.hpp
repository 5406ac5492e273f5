#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hsmooth/grid.hpp"

namespace hsmooth {

/// Fully resolved settings of one command-line run. Serialized as JSON
/// (schema_version 1) next to every run's outputs.
struct RunConfig {
  int schema_version = 1;
  std::string subcommand;  // fit, simulate, study, threshold
  std::vector<std::string> inputs;
  std::string out_dir = "out";
  std::string prior = "nj";  // lasso, horseshoe, cauchy, pareto, nj, tps
  Index n_iter = 3000;
  Index burn_in = 1000;
  Index thin = 1;
  Index partial_update_period = 3;
  int order = 1;
  std::uint64_t seed = 1;
  Index nx = 20;
  Index ny = 20;
  bool ensemble = false;

  // simulate
  double magnitude = 2.0;
  double tau2 = 0.1;
  double sigma2 = 0.5;
  Index members = 1;

  // study
  bool desk_scale = false;
  bool paper_scale = false;
  Index replicates = 10;
  unsigned workers = 0;
  std::vector<double> noise_levels{0.001, 0.01, 0.1};
  std::vector<double> magnitudes{0.5, 1.0, 2.0, 4.0};
  std::vector<std::string> methods{"lasso", "horseshoe", "cauchy",
                                   "pareto", "nj", "tps"};
  std::string cache_dir;
  bool timing = false;

  // threshold
  double theta_min = -10.0;
  double theta_max = 10.0;
  Index theta_points = 201;
  double noise_scale = 1.0;

  /// Throws ConfigError (or PriorError) for inconsistent settings and
  /// IngestError for missing input files.
  void validate() const;
  std::string to_json() const;
  static RunConfig from_json(const std::string& text);
};

/// Parses argv (subcommand first) into a RunConfig. `--config FILE` loads a
/// JSON config that explicit flags then override. Throws ConfigError on
/// usage errors. Sets `help` and returns the usage text in `help_text` when
/// --help is given.
RunConfig parse_command_line(int argc, const char* const* argv, bool& help,
                             std::string& help_text);

/// Runs the subcommand and writes its outputs plus config.json into
/// cfg.out_dir. Returns the process exit status.
int dispatch(const RunConfig& cfg);

/// Entry point: parse, validate, dispatch. Failures are reported on stderr
/// as {"error": {"code": ..., "message": ...}} with a nonzero status.
int cli_main(int argc, const char* const* argv);

}  // namespace hsmooth
