#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sosw/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Degree-4 SOS witness experiments"};
  std::string config_path, experiment, out, format, kappa_rule;
  std::vector<int> n_grid;
  double p = 0.0, kappa = 0.0, c0 = 0.0, tol = 0.0;
  int trials = 0, threads = 0;
  std::uint64_t seed = 0;
  bool check = false, timing = false;

  app.add_option("--config", config_path, "JSON config file; flags override its fields")->check(CLI::ExistingFile);
  app.add_option("--experiment", experiment,
                 "psd_frontier | norm_scaling | expansion_identities | labeling_audit | detection | w_conditions");
  app.add_option("--n", n_grid, "grid of n values")->delimiter(',');
  app.add_option("--p", p, "edge probability");
  app.add_option("--kappa", kappa, "fixed kappa (selects kappa_rule=fixed)");
  app.add_option("--kappa-rule", kappa_rule, "fixed | theorem1 | binary_search");
  app.add_option("--c0", c0, "constant in kappa = c0 n^(-2/3) / log n");
  app.add_option("--trials", trials, "seeds per grid point");
  app.add_option("--seed", seed, "base seed");
  app.add_option("--out", out, "output path (stdout when empty)");
  app.add_option("--format", format, "csv | json");
  app.add_option("--tol", tol, "PSD tolerance");
  app.add_option("--threads", threads, "worker threads");
  app.add_flag("--check", check, "exit with status 2 when any check fails");
  app.add_flag("--timing", timing, "include wall-clock time in the output");
  CLI11_PARSE(app, argc, argv);

  try {
    nlohmann::json cfg = nlohmann::json::object();
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      cfg = nlohmann::json::parse(f);
    }
    if (!experiment.empty()) cfg["experiment"] = experiment;
    if (!n_grid.empty()) cfg["n_grid"] = n_grid;
    if (app.count("--p")) cfg["p"] = p;
    if (app.count("--kappa")) {
      cfg["kappa"] = kappa;
      cfg["kappa_rule"] = "fixed";
    }
    if (!kappa_rule.empty()) cfg["kappa_rule"] = kappa_rule;
    if (app.count("--c0")) cfg["c0"] = c0;
    if (app.count("--trials")) cfg["trials"] = trials;
    if (app.count("--seed")) cfg["seed0"] = seed;
    if (!out.empty()) cfg["output_path"] = out;
    if (!format.empty()) cfg["format"] = format;
    if (app.count("--tol")) cfg["tol"] = tol;
    if (app.count("--threads")) cfg["threads"] = threads;
    if (timing) cfg["record_timing"] = true;
    if (!cfg.contains("experiment")) throw std::invalid_argument("no experiment given");

    const auto config = sosw::config_from_json(cfg);
    const auto result = sosw::run(config);
    if (config.output_path.empty()) sosw::emit(result.records, config, std::cout);
    else sosw::emit_file(result.records, config);

    for (const auto& c : result.checks)
      std::cerr << (c.pass ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : " (" + c.detail + ")") << "\n";
    if (check && !result.all_pass()) return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
