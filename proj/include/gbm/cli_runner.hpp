#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gbm::cli {

/// Every input of a run. Named tensor families are `lame` (a = 1 - nu (n-1))
/// and `scalar` (uncoupled heat equations); any other value is read as a
/// tensor file.
struct RunConfig {
  std::string command;    ///< solve-cauchy | solve-elliptic | mode-factor | validate | lame-demo
  std::string validator;  ///< clt | ito | density, for `validate`

  std::string tensor = "lame";
  double nu = 0.0;
  int dim = 2;
  int trunc_k = 8;
  int grid = 64;
  double dt = 1e-3;
  double time = 0.01;
  std::uint64_t samples = 10000;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::string out = "out";

  // solve-cauchy / lame-demo
  std::string init = "cos";  ///< cos | random
  int init_k = 4;            ///< radius of the random band-limited data
  std::string field_file;
  std::string spectral_file;
  int eval_points = 4;
  bool fd = false;
  bool antithetic = true;

  // solve-elliptic
  std::string elliptic = "scalar";  ///< scalar | system
  int cells = 10;
  std::vector<long> start;
  std::string boundary = "linear";  ///< linear | cos

  // mode-factor
  int levels = 4;

  // validate
  long clt_trials = 10000;
  double clt_p = 0.5;
  double clt_tol = 1e-3;
  long steps = 8;
  int paths = 100;
};

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

/// Validates the config, runs the command, writes CSV outputs and
/// manifest.json into config.out. Module errors produce error.json and exit 1;
/// config errors exit 2.
int run(const RunConfig& config);

/// Parses command-line arguments (argv[0] is the program name) and runs.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, char** argv);

}  // namespace gbm::cli
