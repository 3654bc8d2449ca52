#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "hamrec/reconstruct.hpp"

namespace hamrec {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Coefficient profiles used to synthesize twin-experiment data.
struct SigmaTrueSpec {
  enum class Kind { tanh_profile, piecewise_constant, constant };
  Kind kind = Kind::constant;
  // tanh_profile: offset + amplitude * tanh(steepness * (x - center))
  double offset = 0.0, amplitude = 0.0, steepness = 0.0, center = 0.0;
  // piecewise_constant: values[i] on the segment between interior breakpoints
  std::vector<double> breakpoints, values;
  // constant
  double value = 0.0;

  ElementField sample(const SpaceGrid& grid) const;  // at element centers
};

/// Neumann flux profiles, applied identically at both endpoints.
struct FluxSpec {
  enum class Kind { sin_burst, constant };
  Kind kind = Kind::constant;
  // sin_burst: amplitude * sin(frequency * t) for t < cutoff_time, else 0
  double amplitude = 0.0, frequency = 0.0, cutoff_time = 0.0;
  double value = 0.0;

  BoundaryTrace sample(const TimeGrid& tgrid) const;
};

/// Fully resolved experiment description, parsed from a flat
/// `section.key = value` text file (`#` starts a comment).
struct ExperimentConfig {
  Equation equation = Equation::heat;
  double space_a = 0.0, space_b = 1.0;
  int space_elements = 0;
  double time_final = 0.0;
  int time_steps = 0;
  double sigma_minus = 0.0, sigma_plus = 0.0;
  double delta_start = 1e-1, delta_end = 1e-6;
  int continuation_stages = 8;
  SigmaTrueSpec sigma_true;
  FluxSpec flux;
  int space_refinement = 1, time_refinement = 1;
  NoiseSpec noise;
  NewtonConfig newton;
  KrylovConfig krylov;
  LinearSolverKind linear_solver = LinearSolverKind::direct;
  ObservationMask observe;
  std::string output_dir = ".";

  static ExperimentConfig from_file(const std::string& path);  // throws ConfigError/IoError
  std::map<std::string, std::string> resolved_entries() const;  // manifest content

  SpaceGrid solver_space_grid() const;
  TimeGrid solver_time_grid() const;
  SpaceGrid data_space_grid() const;
  TimeGrid data_time_grid() const;
  ControlBounds bounds() const;
  ReconstructionProblem problem(const BoundaryTrace& measurements) const;
};

// exit codes of the command-line front end
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNoConvergence = 2;
inline constexpr int kExitIo = 3;

/// Synthesizes measurements on the (refined) data grids and writes
/// measurements.csv, sigma_true.csv and the manifest into out_dir.
int cmd_generate(const std::string& config_path, const std::string& out_dir,
                 std::optional<long long> seed_override);

/// Runs the continuation on the given measurement file and writes
/// sigma_avg{1,2,3}.csv, sigma_spacetime.csv, diagnostics.csv, fit.csv and
/// the state fields into out_dir. Returns kExitNoConvergence when a stage
/// did not converge (outputs are still written).
int cmd_reconstruct(const std::string& config_path,
                    const std::string& measurements_path,
                    const std::string& out_dir);

/// Renders result files in dir into gnuplot-consumable .dat files.
int cmd_report(const std::string& dir);

}  // namespace hamrec
