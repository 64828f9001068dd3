#include "localdpm/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "localdpm/error.hpp"
#include "localdpm/fftsolve.hpp"

namespace localdpm {

std::vector<int> grid_sizes(const ExperimentConfig& config) {
  require(config.nmin >= 8, ErrorCode::InvalidParameter, "nmin must be at least 8");
  require(config.nmax >= config.nmin, ErrorCode::InvalidParameter, "nmax must be >= nmin");
  std::vector<int> sizes;
  for (long n = config.nmin; n <= config.nmax; n *= 2) sizes.push_back(static_cast<int>(n));
  return sizes;
}

ManufacturedSolution manufactured(std::string_view key) {
  if (key == "sincos") {
    return {[](Vec2 p) { return std::sin(p.x) * std::cos(p.y); },
            [](Vec2 p) {
              return Vec2{std::cos(p.x) * std::cos(p.y), -std::sin(p.x) * std::sin(p.y)};
            },
            [](Vec2 p) { return -2.0 * std::sin(p.x) * std::cos(p.y); }};
  }
  if (key == "linear") {
    return {[](Vec2 p) { return p.x + p.y; }, [](Vec2) { return Vec2{1.0, 1.0}; },
            [](Vec2) { return 0.0; }};
  }
  if (key == "one") {
    return {[](Vec2) { return 1.0; }, [](Vec2) { return Vec2{}; }, [](Vec2) { return 0.0; }};
  }
  fail(ErrorCode::InvalidParameter, "unknown manufactured solution '" + std::string(key) + "'");
}

namespace {

template <class F>
auto step(int index, F&& body) {
  try {
    return body();
  } catch (const DpmError& e) {
    if (e.step() != 0) throw;
    throw DpmError(e.code(), "step " + std::to_string(index) + ": " + e.what(), index);
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const char* bc_name(BcKind kind) { return kind == BcKind::Dirichlet ? "dirichlet" : "robin"; }

}  // namespace

SolveReport run_solve(const ExperimentConfig& config, int n, SolveArtifacts* artifacts) {
  const auto t_start = std::chrono::steady_clock::now();
  require(n >= 8, ErrorCode::InvalidParameter, "N must be at least 8");
  const LevelSetShape shape = shape_from_key(config.shape, config.alpha);
  const ManufacturedSolution ms = manufactured(config.solution);
  const double sigma = config.sigma;
  const ScalarField f = [&](Vec2 p) { return ms.laplacian(p) - sigma * ms.u(p); };

  AuxGrid grid;
  PointSets sets;
  std::vector<RawIntersection> raw;
  step(1, [&] {
    grid = build_grid(Bounds::square(config.half_width), n);
    std::vector<UnresolvedEdge> unresolved;
    raw = grid_line_intersections(shape, grid, config.guard, &unresolved);
    if (!config.exclude_unresolved) unresolved.clear();
    sets = classify_points(grid, shape, config.order, unresolved);
  });
  std::vector<IntersectionPoint> pairs = step(2, [&] { return pair_intersections(sets, raw); });
  step(3, [&] { build_eta_omega(sets, pairs); });

  const SpectralPlan plan(grid, config.order, sigma);
  const auto t_pot = std::chrono::steady_clock::now();
  PotentialOperator P = step(5, [&] { return assemble_P(sets, plan, config.threads); });
  const double seconds_potentials = seconds_since(t_pot);
  step(7, [&] {
    require(P.matrix.rows() == static_cast<Eigen::Index>(sets.zeta_plus.size()),
            ErrorCode::AssemblyInvariant, "potential operator is not restricted to zeta+");
  });

  std::vector<SparseRow> bc_rows, compat_rows, extrap_rows;
  step(8, [&] {
    assign_nudges(shape, pairs, grid, config.bc);
    for (const IntersectionPoint& p : pairs) {
      if (p.layer == 2) {
        compat_rows.push_back(compatibility_row(p, sets, sigma, f));
      } else if (config.bc == BcKind::Dirichlet) {
        bc_rows.push_back(dirichlet_row(p, sets, ms.u));
      } else {
        const Vec2 normal = outward_normal(shape, *p.nudged_position, grid.h());
        const double a = config.robin_coeff;
        const ScalarField g = [&](Vec2 x) { return dot(normal, ms.grad(x)) + a * ms.u(x); };
        bc_rows.push_back(robin_row(p, normal, sets, a, g));
      }
    }
    extrap_rows = extrapolation_rows(sets);
    if (!config.debug_pointsets.empty()) write_pointsets_csv(config.debug_pointsets, sets, pairs);
  });

  const auto t_solve = std::chrono::steady_clock::now();
  GridFunction Gf;
  ExtendedValues Gf_ext;
  BoundarySystem system;
  DensitySolution density = step(9, [&] {
    GridFunction fv(n);
    for (int i = 0; i < grid.interior_count(); ++i)
      if (sets.in_m_plus(i)) fv[i] = f(grid.position(grid.node(i)));
    Gf_ext = particular_solution_extended(fv, sets, plan);
    Gf = GridFunction(n);
    for (int i = 0; i < grid.interior_count(); ++i) Gf[i] = static_cast<double>(Gf_ext[i]);
    system = assemble_boundary_system(sets, P, Gf, bc_rows, compat_rows, extrap_rows);
    DensityOptions options;
    options.condition_2norm = config.cond2;
    options.condition_inf = config.cond_inf;
    if (config.refine > 0) {
      options.residual = extended_residual(system, sets, plan, Gf_ext);
      options.refinement_steps = config.refine;
    }
    return solve_density(system, options);
  });
  const double seconds_solve = seconds_since(t_solve);

  GridFunction u = step(10, [&] {
    return config.refine > 0 ? reconstruct_extended(density.density, Gf_ext, sets, plan)
                             : reconstruct(density.density, Gf, sets, plan);
  });

  SolveReport report;
  report.shape = config.shape;
  report.alpha = config.alpha;
  report.scheme = static_cast<int>(config.order);
  report.sigma = sigma;
  report.bc = bc_name(config.bc);
  report.n = n;
  report.h = grid.h();
  for (int i = 0; i < grid.interior_count(); ++i) {
    if (!sets.in_m_plus(i)) continue;
    const double e = std::abs(u[i] - ms.u(grid.position(grid.node(i))));
    report.err_max = std::max(report.err_max, e);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  report.order = nan;
  report.cond_order = nan;
  report.cond2 = density.cond2;
  report.cond_inf = density.cond_inf;
  report.gamma_count = static_cast<int>(sets.gamma.size());
  report.zeta_count = static_cast<int>(sets.zeta.size());
  report.residual = density.residual;
  report.seconds_potentials = seconds_potentials;
  report.seconds_solve = seconds_solve;
  report.seconds_total = seconds_since(t_start);

  if (artifacts != nullptr) {
    artifacts->sets = std::move(sets);
    artifacts->pairs = std::move(pairs);
    artifacts->P = std::move(P);
    artifacts->system = std::move(system);
    artifacts->density = std::move(density);
    artifacts->solution = std::move(u);
  }
  return report;
}

namespace {

std::vector<ExperimentConfig> expand(const ExperimentConfig& config) {
  std::vector<double> alphas = config.alpha_sweep;
  if (alphas.empty()) alphas.push_back(config.alpha);
  std::vector<double> sigmas = config.sigma_sweep;
  if (sigmas.empty()) sigmas.push_back(config.sigma);
  std::vector<ExperimentConfig> runs;
  for (double a : alphas) {
    for (double s : sigmas) {
      ExperimentConfig c = config;
      c.alpha = a;
      c.sigma = s;
      runs.push_back(c);
    }
  }
  return runs;
}

void fill_orders(std::vector<SolveReport>& rows, std::size_t first) {
  for (std::size_t i = first + 1; i < rows.size(); ++i) {
    const double hr = std::log(rows[i - 1].h / rows[i].h);
    rows[i].order = std::log(rows[i - 1].err_max / rows[i].err_max) / hr;
    rows[i].cond_order = std::log(rows[i].cond2 / rows[i - 1].cond2) / hr;
  }
}

double fit_exponent(const std::vector<SolveReport>& rows, std::size_t first) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(rows.size() - first);
  for (std::size_t i = first; i < rows.size(); ++i) {
    const double x = std::log(1.0 / rows[i].h);
    const double y = std::log(rows[i].cond2);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

ResultTable sweep(const ExperimentConfig& config, bool condition) {
  ResultTable table;
  const std::vector<int> sizes = grid_sizes(config);
  for (ExperimentConfig run : expand(config)) {
    if (condition) run.cond2 = true;
    const std::size_t first = table.rows.size();
    for (int n : sizes) table.rows.push_back(run_solve(run, n));
    fill_orders(table.rows, first);
    if (condition) table.cond_exponents.push_back(fit_exponent(table.rows, first));
  }
  return table;
}

}  // namespace

ResultTable run_convergence(const ExperimentConfig& config) {
  require(grid_sizes(config).size() >= 3, ErrorCode::InvalidParameter,
          "a convergence study needs at least three grid sizes");
  return sweep(config, false);
}

ResultTable run_condition_sweep(const ExperimentConfig& config) {
  require(grid_sizes(config).size() >= 3, ErrorCode::InvalidParameter,
          "a condition study needs at least three grid sizes");
  return sweep(config, true);
}

ResultTable run_experiment(const ExperimentConfig& config) {
  switch (config.mode) {
    case Mode::Convergence: return run_convergence(config);
    case Mode::Condition: return run_condition_sweep(config);
    case Mode::Solve: break;
  }
  ResultTable table;
  for (const ExperimentConfig& run : expand(config))
    table.rows.push_back(run_solve(run, config.nmax));
  return table;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "ellipse-dirichlet", "ellipse-robin",       "multi",
      "triangle",          "ellipse-sigma-sweep", "ellipse-alpha-sweep"};
  return names;
}

void apply_preset(ExperimentConfig& c, std::string_view name) {
  c.preset = std::string(name);
  c.sigma_sweep.clear();
  c.alpha_sweep.clear();
  c.sigma = 0.0;
  c.bc = BcKind::Dirichlet;
  c.guard = GuardMode::Strict;
  c.exclude_unresolved = false;
  if (name == "ellipse-dirichlet" || name == "ellipse-robin" || name == "ellipse-sigma-sweep" ||
      name == "ellipse-alpha-sweep") {
    c.shape = "ellipse";
    c.alpha = 10.0;
    c.half_width = 1.2;
    if (name == "ellipse-robin") c.bc = BcKind::Robin;
    if (name == "ellipse-sigma-sweep") c.sigma_sweep = {0.0, 10.0, 100.0, 1000.0};
    if (name == "ellipse-alpha-sweep") c.alpha_sweep = {2.0, 5.0, 10.0};
    return;
  }
  if (name == "multi") {
    c.shape = "multi";
    c.half_width = 1.15;
    // The upper hole touches the outer circle: slivers thinner than h exist at any N.
    c.guard = GuardMode::Tolerant;
    // Nodes next to the crescent would otherwise form M+ islands that leave
    // the boundary system singular.
    c.exclude_unresolved = true;
    return;
  }
  if (name == "triangle") {
    c.shape = "triangle";
    c.half_width = 1.1;
    // Corner tips can fall inside a single grid edge.
    c.guard = GuardMode::Tolerant;
    return;
  }
  fail(ErrorCode::InvalidParameter, "unknown preset '" + std::string(name) + "'");
}

namespace {

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    fail(ErrorCode::InvalidParameter,
         "option '" + std::string(key) + "' expects a number, got '" + std::string(text) + "'");
  }
  return value;
}

bool parse_switch(std::string_view key, std::string_view text) {
  if (text == "on" || text == "true" || text == "1") return true;
  if (text == "off" || text == "false" || text == "0") return false;
  fail(ErrorCode::InvalidParameter,
       "option '" + std::string(key) + "' expects on/off, got '" + std::string(text) + "'");
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void apply_setting(ExperimentConfig& c, std::string_view key, std::string_view value) {
  if (key == "preset") {
    apply_preset(c, value);
  } else if (key == "shape") {
    (void)shape_from_key(value, c.alpha > 0.0 ? c.alpha : 1.0);
    c.shape = std::string(value);
  } else if (key == "alpha") {
    c.alpha = parse_number<double>(key, value);
    require(c.alpha > 0.0, ErrorCode::InvalidParameter, "alpha must be positive");
    c.alpha_sweep.clear();
  } else if (key == "order") {
    c.order = order_from_int(parse_number<int>(key, value));
  } else if (key == "sigma") {
    c.sigma = parse_number<double>(key, value);
    require(c.sigma >= 0.0, ErrorCode::InvalidParameter, "sigma must be non-negative");
    c.sigma_sweep.clear();
  } else if (key == "bc") {
    if (value == "dirichlet") {
      c.bc = BcKind::Dirichlet;
    } else if (value == "robin") {
      c.bc = BcKind::Robin;
    } else {
      fail(ErrorCode::InvalidParameter, "bc must be dirichlet or robin");
    }
  } else if (key == "nmin") {
    c.nmin = parse_number<int>(key, value);
  } else if (key == "nmax") {
    c.nmax = parse_number<int>(key, value);
  } else if (key == "out") {
    c.out = std::string(value);
  } else if (key == "mode") {
    if (value == "solve") {
      c.mode = Mode::Solve;
    } else if (value == "convergence") {
      c.mode = Mode::Convergence;
    } else if (value == "condition") {
      c.mode = Mode::Condition;
    } else {
      fail(ErrorCode::InvalidParameter, "mode must be solve, convergence or condition");
    }
  } else if (key == "threads") {
    c.threads = parse_number<int>(key, value);
    require(c.threads >= 1, ErrorCode::InvalidParameter, "threads must be at least 1");
  } else if (key == "debug-pointsets") {
    c.debug_pointsets = std::string(value);
  } else if (key == "json") {
    c.json = std::string(value);
  } else if (key == "half-width") {
    c.half_width = parse_number<double>(key, value);
    require(c.half_width > 0.0, ErrorCode::InvalidParameter, "half-width must be positive");
  } else if (key == "solution") {
    (void)manufactured(value);
    c.solution = std::string(value);
  } else if (key == "robin-coeff") {
    c.robin_coeff = parse_number<double>(key, value);
  } else if (key == "guard") {
    if (value == "strict") {
      c.guard = GuardMode::Strict;
    } else if (value == "tolerant") {
      c.guard = GuardMode::Tolerant;
    } else {
      fail(ErrorCode::InvalidParameter, "guard must be strict or tolerant");
    }
  } else if (key == "cond2") {
    c.cond2 = parse_switch(key, value);
  } else if (key == "cond-inf") {
    c.cond_inf = parse_switch(key, value);
  } else if (key == "exclude-unresolved") {
    c.exclude_unresolved = parse_switch(key, value);
  } else if (key == "refine") {
    c.refine = parse_number<int>(key, value);
    require(c.refine >= 0 && c.refine <= 10, ErrorCode::InvalidParameter,
            "refine must be between 0 and 10");
  } else {
    fail(ErrorCode::InvalidParameter, "unknown option '" + std::string(key) + "'");
  }
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorCode::InvalidParameter,
           path + ":" + std::to_string(number) + ": expected key=value");
    }
    std::string_view key = trim(s.substr(0, eq));
    if (key.starts_with("--")) key.remove_prefix(2);
    entries.emplace_back(std::string(key), std::string(trim(s.substr(eq + 1))));
  }
  return entries;
}

}  // namespace localdpm
