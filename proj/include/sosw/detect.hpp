#pragma once

#include <optional>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "sosw/models.hpp"
#include "sosw/spectral.hpp"
#include "sosw/witness.hpp"

namespace sosw {

struct TestConfig {
  double c_star = 0.5;
  std::optional<double> lambda_thresh;
  double scaling = 1.0;  // s in [0, 1]
  std::optional<double> kappa;
  PsdOptions psd{.tol = 1e-8, .method = PsdMethod::Auto, .dense_limit = 400, .refine = false, .seed = 0};
};

struct DetectionOutcome {
  double statistic_trace = 0.0;     // sum_i X_{i,i}
  double statistic_weighted = 0.0;  // sum_{i<j} A_ij X_{i,j}
  double threshold_used = 0.0;
  int verdict = 0;
  bool feasible = false;
  // T(G) compares a witness-certified lower bound, not Val(G;4) itself.
  bool proxy = false;
  PsdReport psd;
};

struct LowerBound {
  double objective = 0.0;
  bool feasible = false;
  PsdReport psd;
};

// Certified lower bound n*kappa*s on the degree-4 value, from the clique-restricted witness.
LowerBound clique_lower_bound(const GraphInstance& g, double kappa, const PsdOptions& psd = {},
                              double scaling = 1.0);

DetectionOutcome test_clique(const GraphInstance& g, int k, const TestConfig& config);

DetectionOutcome test_submatrix(const GaussianInstance& a, int k, double mu, const TestConfig& config);

int test_comb(const Eigen::MatrixXd& a, int k, double mu);

// Zeroes every row and column whose set is not contained in `keep` (the empty set stays).
MomentMatrix restrict_witness(const MomentMatrix& m, std::span<const int> keep);

// c' kappa^2 n^2 phi(lambda)
double null_weighted_threshold(int n, double kappa, double lambda, double c_prime = 1.0);
double normal_pdf(double x);

// s = c k n^{-1/3} log n clamped to [0, 1].
double theorem_scaling(int k, int n, double c = 1.0);

}  // namespace sosw
