#include "sosw/decomposition.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "sosw/spectral.hpp"
#include "sosw/subsets.hpp"

namespace sosw {

namespace {

constexpr unsigned kClass1[4] = {kHH, kHT, kTH, kTT};
constexpr unsigned kClass2[6] = {kHH | kTT, kHH | kTH, kHH | kHT, kHT | kTT, kTH | kTT, kHT | kTH};
constexpr unsigned kClass3[4] = {kHH | kHT | kTH, kHH | kHT | kTT, kHH | kTH | kTT, kHT | kTH | kTT};

}  // namespace

int type_count(int eta) {
  switch (eta) {
    case 1: return 4;
    case 2: return 6;
    case 3: return 4;
    case 4: return 1;
    default: throw std::invalid_argument("ribbon class must be 1..4");
  }
}

unsigned face_edges(int eta, int nu) {
  if (nu < 1 || nu > type_count(eta)) throw std::invalid_argument("invalid ribbon type for class");
  switch (eta) {
    case 1: return kClass1[nu - 1];
    case 2: return kClass2[nu - 1];
    case 3: return kClass3[nu - 1];
    default: return kHH | kHT | kTH | kTT;
  }
}

void ComponentKind::validate() const {
  switch (family) {
    case Family::K:
      if (eta != 0 || nu != 0) throw std::invalid_argument("K carries no (eta, nu)");
      return;
    case Family::J:
    case Family::Jtilde:
      face_edges(eta, nu);
      return;
    case Family::L:
      if (!((eta == 1 && (nu == 1 || nu == 2)) || (eta == 2 && nu == 1))) {
        throw std::invalid_argument("L is defined for (1,1), (1,2), (2,1) only");
      }
      return;
  }
}

std::string ComponentKind::name() const {
  const std::string tail = "(" + std::to_string(eta) + "," + std::to_string(nu) + ")";
  switch (family) {
    case Family::K: return "K";
    case Family::J: return "J" + tail;
    case Family::Jtilde: return "Jtilde" + tail;
    case Family::L: return "L" + tail;
  }
  return "?";
}

double component_prefactor(const ComponentKind& kind, const WitnessParams& w) {
  kind.validate();
  switch (kind.family) {
    case Family::K: return w.a(3);
    case Family::J:
    case Family::Jtilde: return w.a(4) * std::pow(w.p, 4 - kind.eta);
    case Family::L: return kind.eta == 2 ? w.a(3) : w.a(3) * w.p;
  }
  return 0.0;
}

namespace {

struct Ctx {
  int n;
  Eigen::MatrixXd g;  // centered matrix, zero diagonal
  SubsetIndexer idx;
  double pref;
  ComponentKind kind;
  unsigned mask = 0;

  Ctx(const GraphInstance& graph, const WitnessParams& w, ComponentKind k)
      : n(graph.n()), g(graph.centered_matrix()), idx(graph.n()), pref(component_prefactor(k, w)), kind(k) {
    if (k.family == Family::J || k.family == Family::Jtilde) mask = face_edges(k.eta, k.nu);
  }

  double gv(int a, int b) const { return g(a - 1, b - 1); }

  // Pair-by-pair entry (K, J, Jtilde).
  double pair_entry(const VertexPair& A, const VertexPair& B) const {
    if (kind.family == Family::K) {
      if (A == B) return 0.0;
      if (A.head == B.head) return pref * gv(A.tail, B.tail);
      if (A.tail == B.head) return pref * gv(A.head, B.tail);
      if (A.head == B.tail) return pref * gv(A.tail, B.head);
      if (A.tail == B.tail) return pref * gv(A.head, B.head);
      return 0.0;
    }
    if (kind.family == Family::J && A.intersects(B)) return 0.0;
    double v = pref;
    if (mask & kHH) v *= gv(A.head, B.head);
    if (mask & kHT) v *= gv(A.head, B.tail);
    if (mask & kTH) v *= gv(A.tail, B.head);
    if (mask & kTT) v *= gv(A.tail, B.tail);
    return v;
  }

  // Singleton-by-pair entry (L).
  double l_entry(int a, const VertexPair& B) const {
    if (B.contains(a)) return 0.0;
    if (kind.eta == 2) return pref * gv(a, B.head) * gv(a, B.tail);
    return pref * (kind.nu == 1 ? gv(a, B.head) : gv(a, B.tail));
  }
};

Eigen::MatrixXd to_pair_matrix(int n, const Eigen::VectorXd& v) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  Eigen::Index r = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, ++r) m(i, j) = m(j, i) = v[r];
  return m;
}

Eigen::VectorXd from_pair_matrix(const Eigen::MatrixXd& m) {
  const auto n = m.rows();
  Eigen::VectorXd v(n * (n - 1) / 2);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j, ++r) v[r] = m(i, j);
  return v;
}

Eigen::MatrixXd dense_pairs(const Ctx& c) {
  const auto& pairs = c.idx.pairs();
  const auto m = static_cast<Eigen::Index>(pairs.size());
  Eigen::MatrixXd out(m, m);
  for (Eigen::Index b = 0; b < m; ++b)
    for (Eigen::Index a = 0; a < m; ++a)
      out(a, b) = c.pair_entry(pairs[static_cast<std::size_t>(a)], pairs[static_cast<std::size_t>(b)]);
  return out;
}

Eigen::MatrixXd dense_l(const Ctx& c) {
  const auto& pairs = c.idx.pairs();
  Eigen::MatrixXd out(c.n, static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t b = 0; b < pairs.size(); ++b)
    for (int a = 1; a <= c.n; ++a) out(a - 1, static_cast<Eigen::Index>(b)) = c.l_entry(a, pairs[b]);
  return out;
}

// Vertex of a pair selected by a face-edge end: 0 = head, 1 = tail (0-based label).
int end_of(const VertexPair& p, int which) { return (which == 0 ? p.head : p.tail) - 1; }

// y_A = pref * sum_B g(X(A), Y(B)) v_B, where X, Y pick head or tail.
Eigen::VectorXd class1_apply(const Ctx& c, int x_end, int y_end, const Eigen::VectorXd& v) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(c.n);
  const auto& pairs = c.idx.pairs();
  for (std::size_t b = 0; b < pairs.size(); ++b) r[end_of(pairs[b], y_end)] += v[static_cast<Eigen::Index>(b)];
  const Eigen::VectorXd s = c.g * r;
  Eigen::VectorXd y(static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t a = 0; a < pairs.size(); ++a) y[static_cast<Eigen::Index>(a)] = c.pref * s[end_of(pairs[a], x_end)];
  return y;
}

void class1_ends(unsigned mask, int& x_end, int& y_end) {
  x_end = (mask == kHH || mask == kHT) ? 0 : 1;
  y_end = (mask == kHH || mask == kTH) ? 0 : 1;
}

// Jtilde(4,1) v, which also equals J(4,1) v.
Eigen::VectorXd j41_apply(const Ctx& c, const Eigen::VectorXd& v) {
  const int n = c.n;
  const Eigen::MatrixXd V = to_pair_matrix(n, v);
  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    const int rows = n - i - 1;
    // Z_{jk} = g_{jk} g_{ik} for j > i.
    const Eigen::MatrixXd Z = c.g.bottomRows(rows).array().rowwise() * c.g.row(i).array();
    const Eigen::MatrixXd T = Z * V;
    const Eigen::VectorXd d = (T.array() * Z.array()).rowwise().sum();
    Y.row(i).tail(rows) = 0.5 * c.pref * d.transpose();
  }
  return from_pair_matrix(Y);
}

// Subtract the entries of Jtilde on intersecting (A,B) so that the result is J v.
void remove_intersecting(const Ctx& c, const Eigen::VectorXd& v, Eigen::VectorXd& y, bool transpose) {
  Ctx tilde = c;
  tilde.kind.family = Family::Jtilde;
  const auto& pairs = c.idx.pairs();
  for (std::size_t a = 0; a < pairs.size(); ++a) {
    const auto& A = pairs[a];
    double acc = 0.0;
    for (int shared : {A.head, A.tail}) {
      for (int other = 1; other <= c.n; ++other) {
        if (other == shared) continue;
        const VertexPair B(std::min(shared, other), std::max(shared, other));
        const auto b = c.idx.pair_rank(B.head, B.tail);
        if (B == A && shared == A.tail) continue;  // count A itself once
        acc += (transpose ? tilde.pair_entry(B, A) : tilde.pair_entry(A, B)) * v[static_cast<Eigen::Index>(b)];
      }
    }
    y[static_cast<Eigen::Index>(a)] -= acc;
  }
}

Eigen::VectorXd generic_apply(const Ctx& c, const Eigen::VectorXd& v, bool transpose) {
  const auto& pairs = c.idx.pairs();
  const auto m = static_cast<Eigen::Index>(pairs.size());
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  for (Eigen::Index a = 0; a < m; ++a) {
    double acc = 0.0;
    const auto& A = pairs[static_cast<std::size_t>(a)];
    for (Eigen::Index b = 0; b < m; ++b) {
      const auto& B = pairs[static_cast<std::size_t>(b)];
      acc += (transpose ? c.pair_entry(B, A) : c.pair_entry(A, B)) * v[b];
    }
    y[a] = acc;
  }
  return y;
}

}  // namespace

ComponentMatrix build_component(const GraphInstance& g, const WitnessParams& params, ComponentKind kind) {
  kind.validate();
  if (g.p() != params.p) throw std::invalid_argument("graph and parameters use different p");
  const Ctx c(g, params, kind);
  ComponentMatrix out;
  out.kind = kind;
  out.prefactor = c.pref;
  out.values = kind.family == Family::L ? dense_l(c) : dense_pairs(c);
  return out;
}

LinearOperator component_operator(const GraphInstance& g, const WitnessParams& params, ComponentKind kind) {
  kind.validate();
  auto c = std::make_shared<const Ctx>(g, params, kind);
  const auto m = static_cast<Eigen::Index>(c->idx.pair_count());
  LinearOperator op;
  if (kind.family == Family::L) {
    return LinearOperator::dense(dense_l(*c));
  }
  op.rows = op.cols = m;
  if (kind.family == Family::K) {
    auto f = [c](const Eigen::VectorXd& v, Eigen::VectorXd& y) {
      const Eigen::MatrixXd V = to_pair_matrix(c->n, v);
      y = c->pref * from_pair_matrix(V * c->g + c->g * V);
    };
    return LinearOperator::symmetric(m, f);
  }
  if (kind.eta == 4) {
    auto f = [c](const Eigen::VectorXd& v, Eigen::VectorXd& y) { y = j41_apply(*c, v); };
    return LinearOperator::symmetric(m, f);
  }
  if (kind.eta == 1) {
    int xe = 0, ye = 0;
    class1_ends(c->mask, xe, ye);
    const bool restricted = kind.family == Family::J;
    op.apply = [c, xe, ye, restricted](const Eigen::VectorXd& v, Eigen::VectorXd& y) {
      y = class1_apply(*c, xe, ye, v);
      if (restricted) remove_intersecting(*c, v, y, false);
    };
    op.apply_transpose = [c, xe, ye, restricted](const Eigen::VectorXd& v, Eigen::VectorXd& y) {
      y = class1_apply(*c, ye, xe, v);
      if (restricted) remove_intersecting(*c, v, y, true);
    };
    return op;
  }
  op.apply = [c](const Eigen::VectorXd& v, Eigen::VectorXd& y) { y = generic_apply(*c, v, false); };
  op.apply_transpose = [c](const Eigen::VectorXd& v, Eigen::VectorXd& y) { y = generic_apply(*c, v, true); };
  return op;
}

LinearOperator jtilde_class1_sum_operator(const GraphInstance& g, const WitnessParams& params) {
  auto c = std::make_shared<const Ctx>(g, params, ComponentKind::jtilde(1, 1));
  const auto m = static_cast<Eigen::Index>(c->idx.pair_count());
  // (sum_nu Jtilde(1,nu) v)_{ij} = pref (s_i + s_j), s = g * rowsum(V).
  auto f = [c](const Eigen::VectorXd& v, Eigen::VectorXd& y) {
    const Eigen::MatrixXd V = to_pair_matrix(c->n, v);
    const Eigen::VectorXd s = c->g * V.rowwise().sum();
    y.resize(v.size());
    Eigen::Index r = 0;
    for (int i = 0; i < c->n; ++i)
      for (int j = i + 1; j < c->n; ++j, ++r) y[r] = c->pref * (s[i] + s[j]);
  };
  return LinearOperator::symmetric(m, f);
}

ExpansionResidual verify_expansion_H22(const GraphInstance& g, const WitnessParams& w) {
  const auto blocks = extract_blocks(build_matrix(g, w, MatrixKind::H));
  const Eigen::MatrixXd dev = blocks.h22 - expected_block(Block::H22, g.n(), w);
  auto J = [&](int eta, int nu) { return build_component(g, w, ComponentKind::j(eta, nu)).values; };
  auto Jt = [&](int eta, int nu) { return build_component(g, w, ComponentKind::jtilde(eta, nu)).values; };
  Eigen::MatrixXd sum = build_component(g, w, ComponentKind::k()).values;
  sum += J(2, 1) + J(2, 6) + J(4, 1);
  for (int nu = 1; nu <= 4; ++nu) sum += J(3, nu);
  for (int nu = 1; nu <= 4; ++nu) sum += J(1, nu) - Jt(1, nu);
  for (int nu = 2; nu <= 5; ++nu) sum += J(2, nu) - Jt(2, nu);
  for (int nu = 1; nu <= 4; ++nu) sum += Jt(1, nu);
  for (int nu = 2; nu <= 5; ++nu) sum += Jt(2, nu);
  ExpansionResidual r;
  r.residual = (dev - sum).cwiseAbs().maxCoeff();
  r.scale = w.a(4);
  return r;
}

ExpansionResidual verify_expansion_H12(const GraphInstance& g, const WitnessParams& w) {
  const auto blocks = extract_blocks(build_matrix(g, w, MatrixKind::H));
  const Eigen::MatrixXd dev = blocks.h12 - expected_block(Block::H12, g.n(), w);
  const Eigen::MatrixXd sum = build_component(g, w, ComponentKind::l(1, 1)).values +
                              build_component(g, w, ComponentKind::l(1, 2)).values +
                              build_component(g, w, ComponentKind::l(2, 1)).values;
  ExpansionResidual r;
  r.scale = w.a(3);
  r.residual = (dev - sum).cwiseAbs().maxCoeff();
  SubsetIndexer idx(g.n());
  for (int a = 1; a <= g.n(); ++a)
    for (std::size_t b = 0; b < idx.pair_count(); ++b)
      if (idx.pair_at(b).contains(a) && dev(a - 1, static_cast<Eigen::Index>(b)) != 0.0) r.intersecting_exact = false;
  return r;
}

KernelReport kernel_identities(const GraphInstance& g, const WitnessParams& w) {
  const ProjectorFamily proj(g.n());
  const Eigen::MatrixXd p2 = proj.dense(2);
  auto Jt = [&](int eta, int nu) { return build_component(g, w, ComponentKind::jtilde(eta, nu)).values; };
  Eigen::MatrixXd s1 = Jt(1, 1) + Jt(1, 2) + Jt(1, 3) + Jt(1, 4);
  const Eigen::MatrixXd j22 = Jt(2, 2), j23 = Jt(2, 3), j24 = Jt(2, 4), j25 = Jt(2, 5);
  KernelReport r;
  r.p2_sum_j1 = spectral_norm_dense(p2 * s1);
  r.sum_j1_p2 = spectral_norm_dense(s1 * p2);
  r.j22_j24_p2 = spectral_norm_dense((j22 + j24) * p2);
  r.p2_j23_j25 = spectral_norm_dense(p2 * (j23 + j25));
  r.transpose_pairing = j22 == j23.transpose() && j24 == j25.transpose();
  r.bound = 1e-9 * w.a(4) * g.n();
  return r;
}

NormEstimate projected_norm(int a, const LinearOperator& x, int b, const LanczosOptions& opt) {
  if (x.rows != x.cols) throw std::invalid_argument("projected_norm needs a pairs x pairs operator");
  const auto m = x.rows;
  const int n = static_cast<int>(std::lround((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(m))) / 2.0));
  if (static_cast<Eigen::Index>(n) * (n - 1) / 2 != m) throw std::invalid_argument("operator size is not C(n,2)");
  auto proj = std::make_shared<const ProjectorFamily>(n);
  auto pa = [proj](int k, const Eigen::VectorXd& v) { return k < 0 ? v : proj->apply(k, v); };
  LinearOperator c;
  c.rows = c.cols = m;
  c.apply = [=](const Eigen::VectorXd& v, Eigen::VectorXd& y) {
    Eigen::VectorXd t;
    x.apply(pa(b, v), t);
    y = pa(a, t);
  };
  c.apply_transpose = [=](const Eigen::VectorXd& v, Eigen::VectorXd& y) {
    Eigen::VectorXd t;
    x.apply_transpose(pa(a, v), t);
    y = pa(b, t);
  };
  return spectral_norm(c, opt);
}

NormEstimate projected_norm(int a, const Eigen::MatrixXd& x, int b, const LanczosOptions& opt) {
  return projected_norm(a, LinearOperator::dense(x), b, opt);
}

}  // namespace sosw
