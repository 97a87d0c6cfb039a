#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "sosw/linalg.hpp"

namespace sosw {

struct WitnessParams;
struct HBlocks;

// P0, P1, P2 on R^{C(n,2)} (pair vectors in lexicographic order) and
// Q_n = 11^T/n, its complement on R^n. All applies are O(n^2).
class ProjectorFamily {
 public:
  explicit ProjectorFamily(int n);

  int n() const { return n_; }
  Eigen::Index pair_dim() const { return m_; }

  Eigen::VectorXd apply(int a, const Eigen::VectorXd& v) const;
  Eigen::VectorXd apply_q(const Eigen::VectorXd& x) const;
  Eigen::VectorXd apply_q_perp(const Eigen::VectorXd& x) const;

  // (S v)_i = sum_{j != i} v_{ij}  and its adjoint (S^T u)_{ij} = u_i + u_j.
  Eigen::VectorXd star_sum(const Eigen::VectorXd& v) const;
  Eigen::VectorXd star_lift(const Eigen::VectorXd& u) const;

  // Dense projector matrices, only for small n.
  Eigen::MatrixXd dense(int a) const;
  Eigen::MatrixXd dense_q() const;
  Eigen::MatrixXd dense_q_perp() const;

  // Overcomplete unit-norm spanning vectors of V0, V1, V2 (1-based labels).
  Eigen::VectorXd basis_v0() const;
  Eigen::VectorXd basis_v1(int i) const;
  Eigen::VectorXd basis_v2(int i, int j) const;

  static constexpr int kDenseLimit = 40;

 private:
  void check_pair_vector(const Eigen::VectorXd& v) const;
  Eigen::VectorXd apply01(const Eigen::VectorXd& v) const;

  int n_;
  Eigen::Index m_;
};

enum class Block { H11, H12, H22 };

struct ExpectedSpectrum {
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::array<long long, 3> multiplicity{};
};

Eigen::MatrixXd expected_block(Block b, int n, const WitnessParams& params);
ExpectedSpectrum eigenvalues_expected_H22(int n, const WitnessParams& params);
// E{H22} v via its spectral decomposition.
Eigen::VectorXd apply_expected_H22(const ProjectorFamily& proj, const WitnessParams& params,
                                   const Eigen::VectorXd& v);

struct H12Norms {
  double qperp_p0 = 0.0;
  double qperp_p1 = 0.0;
  double qperp_p2 = 0.0;
  double q_p0 = 0.0;
  double q_p1 = 0.0;
  double q_p2 = 0.0;
};

H12Norms expected_H12_norms(int n, const WitnessParams& params);

enum class PsdMethod { Auto, ShiftedFactorization, ExtremeEigenvalueIteration, DenseEigendecomposition };
std::string to_string(PsdMethod m);

struct PsdOptions {
  double tol = 1e-8;
  PsdMethod method = PsdMethod::Auto;
  // Below this size Auto uses a dense eigendecomposition.
  Eigen::Index dense_limit = 400;
  // Whether to estimate the smallest eigenvalue beyond the factorization verdict.
  bool refine = true;
  std::uint64_t seed = 0;
};

struct PsdReport {
  double min_eig_estimate = 0.0;
  PsdMethod method = PsdMethod::Auto;
  double tol = 0.0;
  double scale = 0.0;
  bool verdict = false;
  // Bracket for the smallest eigenvalue established by factorizations.
  double lower_bound = -std::numeric_limits<double>::infinity();
  double upper_bound = std::numeric_limits<double>::infinity();
};

PsdReport psd_check(const Eigen::MatrixXd& x, const PsdOptions& opt = {});

struct SchurReport {
  bool degenerate = false;
  std::string error;
  double h11_condition = 0.0;
  PsdReport h11_psd;
  PsdReport h11_inverse_bound;  // bound - H11^{-1}
  PsdReport h22_bound;          // H22 - (2/a1) H12^T Qperp H12 - H12^T Q H12 / (n(a2 p - a1^2))
  PsdReport exact_schur;        // H22 - H12^T H11^{-1} H12
  bool h11_ok() const { return !degenerate && h11_psd.verdict; }
  bool inverse_bound_ok() const { return !degenerate && h11_inverse_bound.verdict; }
  bool h22_bound_ok() const { return !degenerate && h22_bound.verdict; }
  bool exact_ok() const { return !degenerate && exact_schur.verdict; }
};

SchurReport schur_condition_check(const HBlocks& blocks, const WitnessParams& params,
                                  double tol = 1e-8);

struct ConditionReport {
  Eigen::Matrix3d Wbar = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d W = Eigen::Matrix3d::Zero();
  double C = 1.0;
  double nbar = 0.0;
  std::array<double, 3> sylvester{};
  bool defined = false;  // false when alpha2 p - alpha1^2 <= 0
  std::string error;
  bool alpha1_condition = false;  // alpha1 >= 2 alpha2 p + 2 alpha2 sqrt(nbar)
  bool alpha2_condition = false;  // alpha2 p^2 >= alpha1^2
  bool w_condition = false;       // all three minors positive
  bool all() const { return defined && alpha1_condition && alpha2_condition && w_condition; }
};

ConditionReport evaluate_W_conditions(double n, const WitnessParams& params, double C = 1.0);

}  // namespace sosw
