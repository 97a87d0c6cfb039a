#include "sosw/detect.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace sosw {

namespace {

struct RestrictedWitness {
  CliqueRestricted m;
  PsdReport psd;
  bool in_range = false;
};

RestrictedWitness restricted_witness(const GraphInstance& g, double kappa, double scaling, const PsdOptions& psd) {
  if (!(scaling >= 0.0 && scaling <= 1.0)) throw std::invalid_argument("scaling must lie in [0, 1]");
  RestrictedWitness w;
  w.m = build_clique_restricted_M(g, derive_alphas(kappa, g.p()));
  w.m.values *= scaling;
  w.m.values(0, 0) = 1.0;
  w.in_range = w.m.values.minCoeff() >= 0.0 && w.m.values.maxCoeff() <= 1.0;
  w.psd = witness_psd(w.m.values, psd);
  return w;
}

}  // namespace

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double null_weighted_threshold(int n, double kappa, double lambda, double c_prime) {
  return c_prime * kappa * kappa * static_cast<double>(n) * n * normal_pdf(lambda);
}

double theorem_scaling(int k, int n, double c) {
  const double s = c * k * std::pow(static_cast<double>(n), -1.0 / 3.0) * std::log(static_cast<double>(n));
  return std::clamp(s, 0.0, 1.0);
}

LowerBound clique_lower_bound(const GraphInstance& g, double kappa, const PsdOptions& psd, double scaling) {
  const auto w = restricted_witness(g, kappa, scaling, psd);
  LowerBound out;
  out.psd = w.psd;
  out.feasible = w.in_range && w.psd.verdict;
  double trace = 0.0;
  for (int i = 1; i <= g.n(); ++i) trace += w.m.values(i, i);
  out.objective = out.feasible ? trace : 0.0;
  return out;
}

DetectionOutcome test_clique(const GraphInstance& g, int k, const TestConfig& config) {
  if (!config.kappa) throw std::invalid_argument("test_clique needs kappa");
  const auto lb = clique_lower_bound(g, *config.kappa, config.psd, config.scaling);
  DetectionOutcome out;
  out.proxy = true;
  out.feasible = lb.feasible;
  out.psd = lb.psd;
  out.statistic_trace = lb.objective;
  out.threshold_used = config.c_star * k;
  out.verdict = lb.feasible && lb.objective > out.threshold_used ? 1 : 0;
  return out;
}

DetectionOutcome test_submatrix(const GaussianInstance& a, int k, double mu, const TestConfig& config) {
  if (!config.lambda_thresh) throw std::invalid_argument("test_submatrix needs lambda_thresh");
  const GraphInstance g = threshold_graph(a, *config.lambda_thresh);
  const double kappa = config.kappa ? *config.kappa : theorem_kappa(a.n);
  const auto w = restricted_witness(g, kappa, config.scaling, config.psd);
  DetectionOutcome out;
  out.psd = w.psd;
  out.feasible = w.in_range && w.psd.verdict;
  for (int i = 1; i <= a.n; ++i) {
    out.statistic_trace += w.m.values(i, i);
    for (int j = i + 1; j <= a.n; ++j) out.statistic_weighted += a.A(i - 1, j - 1) * w.m.values(i, j);
  }
  out.threshold_used = config.c_star * mu * k * k;
  out.verdict = out.feasible && out.statistic_trace <= k && out.statistic_weighted >= out.threshold_used ? 1 : 0;
  return out;
}

int test_comb(const Eigen::MatrixXd& a, int k, double mu) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n) throw std::invalid_argument("test_comb needs a square matrix");
  if (n > 24 && k > 3) throw std::length_error("test_comb search budget exceeded (n > 24 and k > 3)");
  const double threshold = 0.5 * (k * (k - 1) / 2.0) * mu;
  if (threshold <= 0.0) return 1;  // x = 0 already qualifies
  std::vector<int> chosen;
  auto rec = [&](auto&& self, int start, double sum) -> bool {
    if (sum >= threshold) return true;
    if (static_cast<int>(chosen.size()) == k) return false;
    for (int v = start; v < n; ++v) {
      double add = 0.0;
      for (int u : chosen) add += a(std::min(u, v), std::max(u, v));
      chosen.push_back(v);
      const bool hit = self(self, v + 1, sum + add);
      chosen.pop_back();
      if (hit) return true;
    }
    return false;
  };
  return rec(rec, 0, 0.0) ? 1 : 0;
}

MomentMatrix restrict_witness(const MomentMatrix& m, std::span<const int> keep) {
  const auto& ix = m.indexer();
  std::vector<char> in(static_cast<std::size_t>(ix.n() + 1), 0);
  for (int v : keep) {
    if (v < 1 || v > ix.n()) throw std::out_of_range("vertex label out of range");
    in[static_cast<std::size_t>(v)] = 1;
  }
  Eigen::MatrixXd v = m.values();
  const auto offset = m.kind() == MatrixKind::H ? 1 : 0;
  for (std::size_t idx = static_cast<std::size_t>(offset); idx < ix.dim(); ++idx) {
    const Subset s = ix.set_of(idx);
    bool inside = true;
    for (int e : s.elements()) inside = inside && in[static_cast<std::size_t>(e)];
    if (inside) continue;
    const auto r = static_cast<Eigen::Index>(idx) - offset;
    v.row(r).setZero();
    v.col(r).setZero();
  }
  return MomentMatrix(ix, m.kind(), std::move(v));
}

}  // namespace sosw
