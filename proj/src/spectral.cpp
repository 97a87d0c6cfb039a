#include "sosw/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "sosw/subsets.hpp"
#include "sosw/witness.hpp"

namespace sosw {

ProjectorFamily::ProjectorFamily(int n) : n_(n) {
  if (n < 4) throw std::invalid_argument("projector family needs n >= 4");
  m_ = static_cast<Eigen::Index>(n) * (n - 1) / 2;
}

void ProjectorFamily::check_pair_vector(const Eigen::VectorXd& v) const {
  if (v.size() != m_) throw std::invalid_argument("pair vector has the wrong length");
}

Eigen::VectorXd ProjectorFamily::star_sum(const Eigen::VectorXd& v) const {
  check_pair_vector(v);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n_);
  Eigen::Index r = 0;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j, ++r) {
      u[i] += v[r];
      u[j] += v[r];
    }
  return u;
}

Eigen::VectorXd ProjectorFamily::star_lift(const Eigen::VectorXd& u) const {
  if (u.size() != n_) throw std::invalid_argument("vertex vector has the wrong length");
  Eigen::VectorXd v(m_);
  Eigen::Index r = 0;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j, ++r) v[r] = u[i] + u[j];
  return v;
}

Eigen::VectorXd ProjectorFamily::apply01(const Eigen::VectorXd& v) const {
  Eigen::VectorXd u = star_sum(v);
  // (S S^T)^{-1} = (I - 11^T/(2n-2)) / (n-2)
  const double total = u.sum();
  u.array() -= total / (2.0 * n_ - 2.0);
  u /= (n_ - 2.0);
  return star_lift(u);
}

Eigen::VectorXd ProjectorFamily::apply(int a, const Eigen::VectorXd& v) const {
  check_pair_vector(v);
  switch (a) {
    case 0:
      return Eigen::VectorXd::Constant(m_, v.mean());
    case 1: {
      Eigen::VectorXd w = apply01(v);
      w.array() -= v.mean();
      return w;
    }
    case 2:
      return v - apply01(v);
    default:
      throw std::invalid_argument("projector index must be 0, 1 or 2");
  }
}

Eigen::VectorXd ProjectorFamily::apply_q(const Eigen::VectorXd& x) const {
  if (x.size() != n_) throw std::invalid_argument("vertex vector has the wrong length");
  return Eigen::VectorXd::Constant(n_, x.mean());
}

Eigen::VectorXd ProjectorFamily::apply_q_perp(const Eigen::VectorXd& x) const {
  return x - apply_q(x);
}

Eigen::MatrixXd ProjectorFamily::dense(int a) const {
  if (n_ > kDenseLimit) throw std::invalid_argument("dense projectors are limited to small n");
  Eigen::MatrixXd p(m_, m_);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(m_);
  for (Eigen::Index c = 0; c < m_; ++c) {
    e[c] = 1.0;
    p.col(c) = apply(a, e);
    e[c] = 0.0;
  }
  return p;
}

Eigen::MatrixXd ProjectorFamily::dense_q() const {
  return Eigen::MatrixXd::Constant(n_, n_, 1.0 / n_);
}

Eigen::MatrixXd ProjectorFamily::dense_q_perp() const {
  return Eigen::MatrixXd::Identity(n_, n_) - dense_q();
}

Eigen::VectorXd ProjectorFamily::basis_v0() const {
  const double n = n_;
  return Eigen::VectorXd::Constant(m_, std::sqrt(2.0 / (n * (n - 1.0))));
}

Eigen::VectorXd ProjectorFamily::basis_v1(int i) const {
  if (i < 1 || i > n_) throw std::out_of_range("vertex label out of range");
  const double n = n_;
  const double on = std::sqrt((n - 2.0) / (n * (n - 1.0)));
  const double off = -2.0 / std::sqrt(n * (n - 1.0) * (n - 2.0));
  Eigen::VectorXd v(m_);
  Eigen::Index r = 0;
  for (int a = 1; a <= n_; ++a)
    for (int b = a + 1; b <= n_; ++b, ++r) v[r] = (a == i || b == i) ? on : off;
  return v;
}

Eigen::VectorXd ProjectorFamily::basis_v2(int i, int j) const {
  if (i < 1 || i > n_ || j < 1 || j > n_) throw std::out_of_range("vertex label out of range");
  if (i == j) throw std::invalid_argument("basis_v2 needs distinct vertices");
  const double n = n_;
  const double c = std::sqrt((n - 3.0) / (n - 1.0));
  const double pairs_rest = (n - 2.0) * (n - 3.0) / 2.0;
  Eigen::VectorXd v(m_);
  Eigen::Index r = 0;
  for (int a = 1; a <= n_; ++a)
    for (int b = a + 1; b <= n_; ++b, ++r) {
      const int hits = (a == i || a == j) + (b == i || b == j);
      v[r] = hits == 2 ? c : hits == 1 ? -c / (n - 2.0) : c / pairs_rest;
    }
  return v;
}

Eigen::MatrixXd expected_block(Block b, int n, const WitnessParams& w) {
  if (n < 5) throw std::invalid_argument("expected blocks need n >= 5");
  const double p = w.p;
  const double a1 = w.a(1), a2 = w.a(2), a3 = w.a(3), a4 = w.a(4);
  switch (b) {
    case Block::H11: {
      Eigen::MatrixXd m = Eigen::MatrixXd::Constant(n, n, a2 * p - a1 * a1);
      m.diagonal().array() += a1 - a2 * p;
      return m;
    }
    case Block::H12: {
      SubsetIndexer idx(n);
      Eigen::MatrixXd m(n, static_cast<Eigen::Index>(idx.pair_count()));
      const double disjoint = a3 * p * p - a1 * a2;
      const double meet = a2 - a1 * a2;
      for (int i = 1; i <= n; ++i)
        for (std::size_t r = 0; r < idx.pair_count(); ++r)
          m(i - 1, static_cast<Eigen::Index>(r)) = idx.pair_at(r).contains(i) ? meet : disjoint;
      return m;
    }
    case Block::H22: {
      SubsetIndexer idx(n);
      const auto m = static_cast<Eigen::Index>(idx.pair_count());
      const double diag = a2 - a2 * a2;
      const double one = a3 * p - a2 * a2;
      const double none = a4 * std::pow(p, 4) - a2 * a2;
      Eigen::MatrixXd out(m, m);
      for (Eigen::Index r = 0; r < m; ++r)
        for (Eigen::Index c = 0; c < m; ++c) {
          const auto& A = idx.pair_at(static_cast<std::size_t>(r));
          const auto& B = idx.pair_at(static_cast<std::size_t>(c));
          out(r, c) = r == c ? diag : A.intersects(B) ? one : none;
        }
      return out;
    }
  }
  throw std::invalid_argument("unknown block");
}

ExpectedSpectrum eigenvalues_expected_H22(int n, const WitnessParams& w) {
  if (n < 5) throw std::invalid_argument("expected spectrum needs n >= 5");
  const double nn = n, p = w.p;
  const double a2 = w.a(2), a3 = w.a(3), a4 = w.a(4);
  const double p4 = std::pow(p, 4);
  ExpectedSpectrum s;
  s.lambda0 = a2 + 2.0 * (nn - 2.0) * a3 * p + (nn - 2.0) * (nn - 3.0) / 2.0 * a4 * p4 -
              nn * (nn - 1.0) / 2.0 * a2 * a2;
  s.lambda1 = a2 + (nn - 4.0) * a3 * p - (nn - 3.0) * a4 * p4;
  s.lambda2 = a2 - 2.0 * a3 * p + a4 * p4;
  s.multiplicity = {1, n - 1, static_cast<long long>(n) * (n - 3) / 2};
  return s;
}

Eigen::VectorXd apply_expected_H22(const ProjectorFamily& proj, const WitnessParams& w,
                                   const Eigen::VectorXd& v) {
  const auto s = eigenvalues_expected_H22(proj.n(), w);
  return s.lambda0 * proj.apply(0, v) + s.lambda1 * proj.apply(1, v) + s.lambda2 * proj.apply(2, v);
}

H12Norms expected_H12_norms(int n, const WitnessParams& w) {
  if (n < 5) throw std::invalid_argument("expected norms need n >= 5");
  const double nn = n, p = w.p;
  const double a1 = w.a(1), a2 = w.a(2), a3 = w.a(3);
  const double disjoint = a3 * p * p - a1 * a2;
  const double meet = a2 - a1 * a2;
  H12Norms r;
  r.qperp_p1 = std::sqrt(nn - 2.0) * std::abs(a2 - a3 * p * p);
  // Every row of E{H12} has the same sum; Q E P0 = (row sum) 1 v0^T / sqrt(C(n,2)).
  const double row_sum = (nn - 1.0) * meet + (nn - 1.0) * (nn - 2.0) / 2.0 * disjoint;
  r.q_p0 = std::sqrt(nn) * std::abs(row_sum) / std::sqrt(nn * (nn - 1.0) / 2.0);
  return r;
}

std::string to_string(PsdMethod m) {
  switch (m) {
    case PsdMethod::Auto: return "auto";
    case PsdMethod::ShiftedFactorization: return "shifted-factorization";
    case PsdMethod::ExtremeEigenvalueIteration: return "extreme-eigenvalue-iteration";
    case PsdMethod::DenseEigendecomposition: return "dense-eigendecomposition";
  }
  return "?";
}

namespace {

bool factorizes(const Eigen::MatrixXd& x, double shift) {
  Eigen::MatrixXd y = x;
  y.diagonal().array() += shift;
  Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(y);
  return llt.info() == Eigen::Success;
}

double gershgorin_upper(const Eigen::MatrixXd& x) {
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double radius = x.row(i).cwiseAbs().sum() - std::abs(x(i, i));
    best = std::max(best, x(i, i) + radius);
  }
  return best;
}

double lanczos_min_eig(const Eigen::MatrixXd& x, std::uint64_t seed) {
  const double sigma = gershgorin_upper(x);
  LanczosOptions opt;
  opt.seed = seed;
  opt.max_iter = static_cast<int>(std::min<Eigen::Index>(x.rows(), 600));
  const auto top = largest_eigenvalue(
      x.rows(),
      [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) { out.noalias() = sigma * v - x * v; }, opt);
  return sigma - top.value;
}

}  // namespace

PsdReport psd_check(const Eigen::MatrixXd& x, const PsdOptions& opt) {
  if (x.rows() != x.cols()) throw std::invalid_argument("psd_check needs a square matrix");
  PsdReport r;
  r.tol = opt.tol;
  if (x.size() == 0) {
    r.verdict = true;
    r.method = PsdMethod::DenseEigendecomposition;
    return r;
  }
  const double max_abs = x.cwiseAbs().maxCoeff();
  if ((x - x.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(max_abs, 1e-300)) {
    throw std::invalid_argument("psd_check needs a symmetric matrix");
  }
  r.scale = x.diagonal().cwiseAbs().maxCoeff();
  if (r.scale == 0.0) r.scale = max_abs;
  if (r.scale == 0.0) {
    r.verdict = true;
    r.min_eig_estimate = 0.0;
    r.lower_bound = r.upper_bound = 0.0;
    r.method = PsdMethod::DenseEigendecomposition;
    return r;
  }
  const double thr = opt.tol * r.scale;
  PsdMethod method = opt.method;
  if (method == PsdMethod::Auto) {
    method = x.rows() <= opt.dense_limit ? PsdMethod::DenseEigendecomposition
                                         : PsdMethod::ShiftedFactorization;
  }
  r.method = method;

  if (method == PsdMethod::DenseEigendecomposition) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x, Eigen::EigenvaluesOnly);
    r.min_eig_estimate = es.eigenvalues()[0];
    r.lower_bound = r.upper_bound = r.min_eig_estimate;
    r.verdict = r.min_eig_estimate >= -thr;
    return r;
  }
  if (method == PsdMethod::ExtremeEigenvalueIteration) {
    r.min_eig_estimate = lanczos_min_eig(x, opt.seed);
    r.verdict = r.min_eig_estimate >= -thr;
    return r;
  }

  // Shifted factorization: the verdict is whether X + tol*scale*I factorizes.
  if (factorizes(x, thr)) {
    r.verdict = true;
    r.lower_bound = -thr;
    r.min_eig_estimate = opt.refine ? std::max(lanczos_min_eig(x, opt.seed), -thr) : -thr;
    return r;
  }
  r.verdict = false;
  r.upper_bound = -thr;
  if (!opt.refine) {
    r.min_eig_estimate = std::nextafter(-thr, -std::numeric_limits<double>::infinity());
    return r;
  }
  // Bracket the smallest eigenvalue with a geometric ladder of shifts.
  const double ceiling = 2.0 * std::max(std::abs(gershgorin_upper(x)), x.cwiseAbs().rowwise().sum().maxCoeff());
  for (double s = 10.0 * thr; s <= 10.0 * ceiling; s *= 10.0) {
    if (factorizes(x, s)) {
      r.lower_bound = -s;
      break;
    }
    r.upper_bound = -s;
  }
  const double est = lanczos_min_eig(x, opt.seed);
  const double below = std::nextafter(r.upper_bound, -std::numeric_limits<double>::infinity());
  r.min_eig_estimate = std::clamp(est, r.lower_bound, below);
  return r;
}

SchurReport schur_condition_check(const HBlocks& b, const WitnessParams& w, double tol) {
  SchurReport r;
  const auto n = b.h11.rows();
  const double a1 = w.a(1);
  const double gap = w.a(2) * w.p - a1 * a1;
  PsdOptions opt;
  opt.tol = tol;
  r.h11_psd = psd_check(b.h11, opt);
  if (!(a1 > 0.0)) {
    r.degenerate = true;
    r.error = "singular H11 path: alpha1 must be positive";
    return r;
  }
  if (!(gap > 0.0)) {
    r.degenerate = true;
    r.error = "alpha2 p - alpha1^2 must be positive";
    return r;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.h11);
  const auto& ev = es.eigenvalues();
  const double lo = ev.cwiseAbs().minCoeff();
  const double hi = ev.cwiseAbs().maxCoeff();
  r.h11_condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(ev[0] > 0.0) || r.h11_condition > 1e12) {
    r.degenerate = true;
    r.error = "singular H11";
    return r;
  }
  const Eigen::MatrixXd inv =
      es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  const Eigen::MatrixXd q = Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  const Eigen::MatrixXd qperp = Eigen::MatrixXd::Identity(n, n) - q;
  const double cq = 1.0 / (static_cast<double>(n) * gap);
  const double cperp = 2.0 / a1;
  Eigen::MatrixXd bound = cq * q + cperp * qperp - inv;
  bound = 0.5 * (bound + bound.transpose()).eval();
  r.h11_inverse_bound = psd_check(bound, opt);

  const Eigen::MatrixXd proj = cperp * qperp + cq * q;
  Eigen::MatrixXd d22 = b.h22 - b.h12.transpose() * proj * b.h12;
  d22 = 0.5 * (d22 + d22.transpose()).eval();
  r.h22_bound = psd_check(d22, opt);
  Eigen::MatrixXd exact = b.h22 - b.h12.transpose() * inv * b.h12;
  exact = 0.5 * (exact + exact.transpose()).eval();
  r.exact_schur = psd_check(exact, opt);
  return r;
}

ConditionReport evaluate_W_conditions(double n, const WitnessParams& w, double C) {
  if (!(n >= 5.0)) throw std::invalid_argument("W conditions need n >= 5");
  if (!(C > 0.0)) throw std::invalid_argument("C must be positive");
  ConditionReport r;
  r.C = C;
  r.nbar = n * std::log(n);
  const double p = w.p, a1 = w.a(1), a2 = w.a(2), a3 = w.a(3), a4 = w.a(4);
  const double p4 = std::pow(p, 4);
  r.Wbar(0, 0) = a2 + 2.0 * (n - 2.0) * a3 * p + (n - 2.0) * (n - 3.0) / 2.0 * a4 * p4 -
                 n * (n - 1.0) / 2.0 * a2 * a2;
  r.Wbar(1, 1) = a2 + (n - 4.0) * a3 * p - (n - 3.0) * a4 * p4;
  r.Wbar(2, 2) = a2 - 2.0 * a3 * p + a4 * p4;
  r.alpha1_condition = a1 >= 2.0 * a2 * p + 2.0 * a2 * std::sqrt(r.nbar);
  r.alpha2_condition = a2 * p * p >= a1 * a1;

  const double gap = a2 * p - a1 * a1;
  if (!(gap > 0.0) || !(a1 > 0.0)) {
    r.defined = false;
    r.error = !(a1 > 0.0) ? "alpha1 must be positive" : "alpha2 p - alpha1^2 <= 0";
    r.W.setConstant(std::numeric_limits<double>::quiet_NaN());
    r.sylvester.fill(std::numeric_limits<double>::quiet_NaN());
    return r;
  }
  r.defined = true;
  const double nb = r.nbar;
  const double sn = std::sqrt(n);
  const double a3n = a3 * nb;
  const double base = C * a3 * std::sqrt(nb) + C * a4 * std::pow(nb, 1.5);
  const double t = std::pow(n, 1.5) * a3 * p * p + 2.0 * sn * a2 + C * a3n;
  const double nd = n * gap;
  const double mix = C * a3n + sn * a2;
  auto& W = r.W;
  W(0, 0) = base + C * a3n * a3n / a1 + t * t / nd;
  W(0, 1) = base + (C / a1) * a3n * mix + (1.0 / nd) * t * (3.0 * a3n);
  W(0, 2) = base + C * a3n * a3n / a1 + (C / nd) * t * a3n;
  W(1, 1) = base + (2.0 / a1) * mix * mix + C * a3n * a3n / nd;
  W(1, 2) = base + (C / a1) * a3n * mix + C * a3n * a3n / nd;
  W(2, 2) = C * a3 * std::sqrt(nb) + C * a4 * nb + C * a3n * a3n / a1 + C * a3n * a3n / nd;
  W(1, 0) = W(0, 1);
  W(2, 0) = W(0, 2);
  W(2, 1) = W(1, 2);

  const Eigen::Matrix3d d = r.Wbar - W;
  r.sylvester[0] = d(0, 0);
  r.sylvester[1] = d.topLeftCorner<2, 2>().determinant();
  r.sylvester[2] = d.determinant();
  r.w_condition = r.sylvester[0] > 0.0 && r.sylvester[1] > 0.0 && r.sylvester[2] > 0.0;
  return r;
}

}  // namespace sosw
