#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "localdpm/error.hpp"
#include "localdpm/experiment.hpp"
#include "localdpm/report_io.hpp"

using namespace localdpm;

namespace {

// Flags that map one-to-one onto config keys.
const char* const kKeys[] = {"preset", "shape",  "alpha",   "order",           "sigma",
                             "bc",     "nmin",   "nmax",    "out",             "mode",
                             "threads", "json",  "solution", "debug-pointsets", "half-width",
                             "robin-coeff", "cond2", "cond-inf", "guard", "refine",
                             "exclude-unresolved"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local-basis difference potentials solver for (Delta - sigma) u = f"};
  std::map<std::string, std::string> flags;
  std::string config_path;
  app.add_option("--config", config_path, "key=value file with the same keys as the flags");
  for (const char* key : kKeys) app.add_option(std::string("--") + key, flags[key]);
  app.get_option("--preset")->description("ellipse-dirichlet, ellipse-robin, multi, triangle, "
                                           "ellipse-sigma-sweep, ellipse-alpha-sweep");
  app.get_option("--order")->description("2 or 4");
  app.get_option("--bc")->description("dirichlet or robin");
  app.get_option("--mode")->description("solve, convergence or condition");
  app.get_option("--out")->description("CSV output path (stdout when absent)");
  app.get_option("--debug-pointsets")->description("CSV dump of point sets (x,y,tag)");
  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig config;
    std::vector<std::pair<std::string, std::string>> file;
    if (!config_path.empty()) file = read_config_file(config_path);

    // A preset sets defaults that the config file and then the flags refine.
    std::string preset = app.count("--preset") ? flags["preset"] : std::string();
    for (const auto& [k, v] : file)
      if (k == "preset" && preset.empty()) preset = v;
    if (!preset.empty()) apply_preset(config, preset);
    for (const auto& [k, v] : file)
      if (k != "preset") apply_setting(config, k, v);
    for (const char* key : kKeys) {
      if (std::string(key) == "preset") continue;
      if (app.count(std::string("--") + key)) apply_setting(config, key, flags[key]);
    }

    const ResultTable table = run_experiment(config);
    if (config.out.empty()) {
      write_csv(std::cout, table.rows);
    } else {
      write_csv_file(config.out, table.rows);
    }
    if (!config.json.empty()) write_json_file(config.json, table, config);
    for (const SolveReport& r : table.rows) {
      std::fprintf(stderr, "N=%d h=%.4g err=%.3e order=%.3f |gamma|=%d |zeta|=%d  %.2fs\n", r.n,
                   r.h, r.err_max, r.order, r.gamma_count, r.zeta_count, r.seconds_total);
    }
    for (double e : table.cond_exponents)
      std::fprintf(stderr, "fitted condition exponent: %.3f\n", e);
  } catch (const DpmError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
