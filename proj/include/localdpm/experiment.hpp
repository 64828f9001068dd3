#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "localdpm/bc.hpp"
#include "localdpm/dpm.hpp"
#include "localdpm/geometry.hpp"
#include "localdpm/grid.hpp"
#include "localdpm/order.hpp"

namespace localdpm {

enum class Mode { Solve, Convergence, Condition };

struct ExperimentConfig {
  std::string preset;  // informational, empty when none
  std::string shape = "ellipse";
  double alpha = 10.0;
  Order order = Order::O2;
  double sigma = 0.0;
  BcKind bc = BcKind::Dirichlet;
  double robin_coeff = 1.0;
  int nmin = 64;
  int nmax = 512;
  double half_width = 1.2;  // auxiliary square [-w, w]^2
  std::string solution = "sincos";
  GuardMode guard = GuardMode::Strict;
  /// Tolerant guard only: keep nodes around unresolved edges out of M+.
  bool exclude_unresolved = false;
  Mode mode = Mode::Convergence;
  int threads = 1;
  std::string out;
  std::string debug_pointsets;
  std::string json;
  /// Extra runs of the same experiment at other sigma or alpha values.
  std::vector<double> sigma_sweep;
  std::vector<double> alpha_sweep;
  /// Correction steps with the long double residual; 0 solves in plain double.
  int refine = 1;
  bool cond2 = true;
  bool cond_inf = true;
};

/// Grid sizes nmin, 2 nmin, 4 nmin, ... up to nmax.
std::vector<int> grid_sizes(const ExperimentConfig& config);

/// Manufactured solution u with gradient; f = (Delta - sigma) u.
struct ManufacturedSolution {
  std::function<double(Vec2)> u;
  std::function<Vec2(Vec2)> grad;
  std::function<double(Vec2)> laplacian;
};
/// "sincos": sin x cos y; "linear": x + y; "one": 1.
ManufacturedSolution manufactured(std::string_view key);

struct SolveReport {
  std::string shape;
  double alpha = 0.0;
  int scheme = 2;
  double sigma = 0.0;
  std::string bc;
  int n = 0;
  double h = 0.0;
  double err_max = 0.0;
  double order = 0.0;       // observed order against the previous row, NaN if none
  double cond2 = 0.0;       // NaN when not computed
  double cond_inf = 0.0;    // NaN when not computed
  double cond_order = 0.0;  // growth exponent of cond2 against the previous row
  int gamma_count = 0;
  int zeta_count = 0;
  double residual = 0.0;
  // Wall-clock seconds; never written to CSV.
  double seconds_potentials = 0.0;
  double seconds_solve = 0.0;
  double seconds_total = 0.0;
};

/// Intermediate objects of a solve, for tests and bindings.
struct SolveArtifacts {
  PointSets sets;
  std::vector<IntersectionPoint> pairs;
  PotentialOperator P;
  BoundarySystem system;
  DensitySolution density;
  GridFunction solution;
};

/// The full pipeline at one grid size. DpmError raised inside carries the
/// step index (1-10) of the pipeline it came from.
SolveReport run_solve(const ExperimentConfig& config, int n, SolveArtifacts* artifacts = nullptr);

struct ResultTable {
  std::vector<SolveReport> rows;
  /// Least-squares slope of log cond2 against log(1/h), one per sweep run
  /// (condition mode only).
  std::vector<double> cond_exponents;
};

/// One report per grid size (and per sweep value) with observed orders.
ResultTable run_convergence(const ExperimentConfig& config);
ResultTable run_condition_sweep(const ExperimentConfig& config);
/// Dispatches on config.mode; solve mode runs the single size nmax.
ResultTable run_experiment(const ExperimentConfig& config);

const std::vector<std::string>& preset_names();
/// Overwrites shape, bounds, bc, sigma and sweeps with the preset's values.
void apply_preset(ExperimentConfig& config, std::string_view name);

/// Sets one option by its flag name (without dashes). Invalid-parameter on
/// unknown keys or malformed values.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// key=value lines; '#' starts a comment; blank lines ignored.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

}  // namespace localdpm
