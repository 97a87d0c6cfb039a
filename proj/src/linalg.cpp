#include "sosw/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

#include "sosw/rng.hpp"

namespace sosw {

LinearOperator LinearOperator::dense(const Eigen::MatrixXd& m) {
  auto shared = std::make_shared<const Eigen::MatrixXd>(m);
  LinearOperator op;
  op.rows = m.rows();
  op.cols = m.cols();
  op.apply = [shared](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y.noalias() = *shared * x; };
  op.apply_transpose = [shared](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    y.noalias() = shared->transpose() * x;
  };
  return op;
}

LinearOperator LinearOperator::symmetric(
    Eigen::Index dim, std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> f) {
  LinearOperator op;
  op.rows = op.cols = dim;
  op.apply = f;
  op.apply_transpose = std::move(f);
  return op;
}

Eigen::VectorXd seeded_unit_vector(Eigen::Index dim, std::uint64_t seed) {
  const CounterRng rng(seed, Stream::Aux);
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = rng.normal(static_cast<std::uint64_t>(i));
  const double nv = v.norm();
  if (nv == 0.0) {
    v.setZero();
    v[0] = 1.0;
    return v;
  }
  return v / nv;
}

namespace {

ExtremeEigen lanczos_once(Eigen::Index dim,
                          const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& op,
                          const LanczosOptions& opt, std::uint64_t seed) {
  const int kmax = static_cast<int>(std::min<Eigen::Index>(dim, std::max(1, opt.max_iter)));
  std::vector<Eigen::VectorXd> q;
  q.reserve(static_cast<std::size_t>(kmax));
  std::vector<double> alpha, beta;
  q.push_back(seeded_unit_vector(dim, seed));
  Eigen::VectorXd w(dim);
  ExtremeEigen out;
  for (int k = 0; k < kmax; ++k) {
    op(q.back(), w);
    const double a = q.back().dot(w);
    alpha.push_back(a);
    // Full reorthogonalization, twice for stability.
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& qi : q) w -= qi.dot(w) * qi;
    const double b = w.norm();
    const int m = static_cast<int>(alpha.size());
    Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd e = m > 1 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), m - 1))
                              : Eigen::VectorXd();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
    const double theta = tri.eigenvalues()[m - 1];
    const double resid = std::abs(b * tri.eigenvectors()(m - 1, m - 1));
    out.value = theta;
    out.residual = resid;
    out.iterations = k + 1;
    const double scale = std::max(std::abs(theta), 1e-300);
    if (resid <= opt.rel_tol * scale || b <= 1e-14 * std::max(1.0, scale)) {
      out.converged = true;
      break;
    }
    if (k + 1 == kmax) {
      out.converged = (k + 1 == dim);  // Krylov space is the full space
      break;
    }
    beta.push_back(b);
    q.push_back(w / b);
  }
  return out;
}

}  // namespace

ExtremeEigen largest_eigenvalue(Eigen::Index dim,
                                const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& op,
                                const LanczosOptions& opt) {
  if (dim <= 0) throw std::invalid_argument("operator dimension must be positive");
  ExtremeEigen best;
  bool have = false;
  const int runs = std::max(1, opt.restarts);
  for (int r = 0; r < runs; ++r) {
    auto e = lanczos_once(dim, op, opt, derive_seed(opt.seed, 0x1a2c, static_cast<std::uint64_t>(r)));
    if (!have || e.value > best.value) {
      const int iters = best.iterations + e.iterations;
      best = e;
      best.iterations = iters;
      have = true;
    } else {
      best.iterations += e.iterations;
    }
  }
  return best;
}

NormEstimate spectral_norm(const LinearOperator& x, const LanczosOptions& opt) {
  if (!x.apply || !x.apply_transpose) throw std::invalid_argument("operator needs apply and apply_transpose");
  Eigen::VectorXd tmp(x.rows);
  auto gram = [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
    x.apply(v, tmp);
    x.apply_transpose(tmp, out);
  };
  const auto e = largest_eigenvalue(x.cols, gram, opt);
  return {std::sqrt(std::max(0.0, e.value)), e.iterations, e.converged};
}

double spectral_norm_dense(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()[0];
}

}  // namespace sosw
