#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "varoc/diagnostics.hpp"

// vendored single-header nlohmann/json
#include "json.hpp"

namespace varoc::io {

using json = nlohmann::json;

/// Configuration problems (bad file, schema violation, out-of-range value).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Filesystem problems while emitting artifacts.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Process exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;  // non-convergence or failed check
inline constexpr int kExitIo = 4;

/// A model instantiated from its config block.
struct ModelSetup {
  OCProblem problem;
  std::optional<Vec> guess_target;           // known target position, if any
  GuessPath guess_path;                      // model-preferred guess positions
  std::optional<AffineSymmetry> symmetry;    // model default generator
  std::function<std::vector<std::pair<Vec, Vec>>(int, unsigned)> probe_sampler;
  json summary_extras;                       // model-specific summary fields
};

struct RunConfig {
  std::string model_id;
  json model_params;
  Formulation formulation = Formulation::Independent;
  double alpha = 0.5, beta = 0.5, gamma = 0.5;
  double horizon = 0.0;
  int num_steps = 0;
  SolverConfig solver;
  GuessStrategy guess = GuessStrategy::ZeroCostate;
  std::optional<AffineSymmetry> symmetry_override;
  std::filesystem::path output_dir;
  std::string output_prefix = "run";

  std::vector<StudyScheme> study_schemes;
  std::vector<int> study_steps;
  int reference_steps = 0;

  int check_probes = 100;
  unsigned check_seed = 20260801u;
};

/// Parses and validates a run configuration. Throws ConfigError.
RunConfig load_config(const std::filesystem::path& path);

/// Builds the registered model named in the config ("kepler"). Throws
/// ConfigError for unknown ids or bad parameters.
ModelSetup build_model(const RunConfig& cfg);

/// Subcommand drivers; they print a short report and return an exit code.
int run_solve(const RunConfig& cfg, std::ostream& log);
int run_study(const RunConfig& cfg, std::ostream& log);
int run_check(const RunConfig& cfg, std::ostream& log);

/// Trajectory CSV re-reader (round-trip checks and external tooling).
struct TrajectoryCsv {
  std::vector<Vec> q, lam;
  std::vector<Vec> u_nodal;
};
TrajectoryCsv read_trajectory_csv(const std::filesystem::path& path, int n, int m);

struct ControlsCsv {
  std::vector<Vec> u1, u2;
};
ControlsCsv read_controls_csv(const std::filesystem::path& path, int m);

}  // namespace varoc::io
