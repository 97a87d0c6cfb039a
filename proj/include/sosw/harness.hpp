#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace sosw {

enum class Experiment { PsdFrontier, NormScaling, ExpansionIdentities, LabelingAudit, Detection, WConditions };
enum class KappaRule { Fixed, Theorem1, BinarySearch };
enum class OutputFormat { Csv, Json };

std::string to_string(Experiment e);
Experiment parse_experiment(const std::string& s);
std::string to_string(KappaRule r);
KappaRule parse_kappa_rule(const std::string& s);

struct ExperimentConfig {
  Experiment experiment = Experiment::ExpansionIdentities;
  std::vector<int> n_grid;
  double p = 0.5;
  KappaRule kappa_rule = KappaRule::Theorem1;
  double kappa = 0.0;  // used by KappaRule::Fixed
  double c0 = 1.0;     // kappa = c0 n^{-2/3} / log n
  double C = 1.0;      // constant in the W formulas
  int trials = 10;
  std::uint64_t seed0 = 1;
  double tol = 1e-8;   // PSD tolerance
  std::string output_path;
  OutputFormat format = OutputFormat::Csv;
  int threads = 1;
  bool record_timing = false;

  // psd_frontier
  double kappa_lo = 1e-6;
  double kappa_hi = 1e-1;
  int bisection_steps = 12;
  double success_fraction = 0.9;
  double slope_lo = -0.85;
  double slope_hi = -0.45;

  // detection
  double lambda = 1.0;
  double mu = 0.2;
  double c_star = 0.5;
  double c_prime = 1.0;
  int comb_n = 20;
  int comb_k = 6;
  double comb_mu = 2.0;

  // norm_scaling
  double ratio_spread = 4.0;

  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& c);

struct Metric {
  std::string name;
  double value = 0.0;
};

struct SeedOutcome {
  std::uint64_t seed = 0;
  std::vector<Metric> metrics;
};

struct ResultRecord {
  std::string experiment;
  int n = 0;
  double p = 0.0;
  double kappa = 0.0;
  std::vector<SeedOutcome> per_seed;
  std::vector<Metric> aggregate;
  double wall_clock = 0.0;  // seconds; emitted only when timing is requested

  const Metric* find(const std::string& name) const;
  bool operator==(const ResultRecord& o) const;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RunResult {
  std::vector<ResultRecord> records;
  std::vector<CheckResult> checks;
  bool all_pass() const;
};

RunResult run(const ExperimentConfig& config);

void emit(const std::vector<ResultRecord>& records, const ExperimentConfig& config, std::ostream& os);
void emit_file(const std::vector<ResultRecord>& records, const ExperimentConfig& config);
std::vector<ResultRecord> parse_csv(std::istream& is);
std::vector<ResultRecord> parse_json(const nlohmann::json& j);

// Runs fn(i) for i in [0, count) on up to `threads` workers. Each index is handled once;
// callers write results into per-index slots so the outcome does not depend on scheduling.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

std::uint64_t trial_seed(std::uint64_t seed0, int n, int trial);

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Shared by the CLI and the acceptance suite.
struct FrontierPoint {
  int n = 0;
  double kappa_star = 0.0;
  bool bracketed = false;  // kappa_lo succeeds and kappa_hi fails
  int successes_at_star = 0;
};
FrontierPoint psd_frontier_point(int n, const ExperimentConfig& config);
bool witness_psd_at(int n, double p, double kappa, std::uint64_t seed, double tol);

struct AuditRow {
  std::string primitive;
  int m = 0;
  int v_star = 0;
  int claim = 0;
  bool at_most = false;  // claim is an upper bound rather than an equality
  bool match = false;
  bool count_bound = false;
};
std::vector<AuditRow> labeling_audit(const std::vector<int>& n_for_bounds);

}  // namespace sosw
