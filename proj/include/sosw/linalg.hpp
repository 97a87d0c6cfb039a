#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Dense>

namespace sosw {

// y = X x for a (possibly rectangular) operator given only through products.
struct LinearOperator {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> apply;
  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> apply_transpose;

  static LinearOperator dense(const Eigen::MatrixXd& m);  // keeps a copy
  static LinearOperator symmetric(Eigen::Index dim,
                                  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> f);
};

struct LanczosOptions {
  double rel_tol = 1e-9;
  int max_iter = 400;
  int restarts = 2;
  std::uint64_t seed = 0;
};

struct ExtremeEigen {
  double value = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Largest eigenvalue of a symmetric operator (Lanczos with full
// reorthogonalization, started from deterministic pseudo-random vectors).
ExtremeEigen largest_eigenvalue(Eigen::Index dim,
                                const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& op,
                                const LanczosOptions& opt = {});

struct NormEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// ||X||_2 as the square root of the top eigenvalue of X^T X.
NormEstimate spectral_norm(const LinearOperator& x, const LanczosOptions& opt = {});
double spectral_norm_dense(const Eigen::MatrixXd& m);

Eigen::VectorXd seeded_unit_vector(Eigen::Index dim, std::uint64_t seed);

}  // namespace sosw
