#include "sosw/witness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace sosw {

bool WitnessParams::in_unit_range() const {
  return std::all_of(alpha.begin(), alpha.end(), [](double a) { return a >= 0.0 && a <= 1.0; });
}

WitnessParams derive_alphas(double kappa, double p) {
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in (0, 1]");
  WitnessParams w;
  w.p = p;
  w.kappa = kappa;
  const double k2 = kappa * kappa;
  w.alpha = {1.0, kappa, 2.0 * k2 / p, k2 * kappa / (p * p * p), 8.0 * k2 * k2 / std::pow(p, 6)};
  return w;
}

WitnessParams explicit_alphas(double p, double a1, double a2, double a3, double a4) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in (0, 1]");
  WitnessParams w;
  w.p = p;
  w.alpha = {1.0, a1, a2, a3, a4};
  return w;
}

double theorem_kappa(int n, double c0) {
  if (n < 2) throw std::invalid_argument("n must be >= 2");
  return c0 * std::pow(static_cast<double>(n), -2.0 / 3.0) / std::log(static_cast<double>(n));
}

std::string to_string(MatrixKind k) {
  switch (k) {
    case MatrixKind::M: return "M";
    case MatrixKind::N: return "N";
    case MatrixKind::H: return "H";
  }
  return "?";
}

MomentMatrix::MomentMatrix(SubsetIndexer indexer, MatrixKind kind, Eigen::MatrixXd values)
    : indexer_(std::move(indexer)), kind_(kind), values_(std::move(values)) {
  const auto expect = static_cast<Eigen::Index>(indexer_.dim()) - (kind_ == MatrixKind::H ? 1 : 0);
  if (values_.rows() != expect || values_.cols() != expect) {
    throw std::invalid_argument("moment matrix has the wrong size");
  }
}

Eigen::Index MomentMatrix::position(const Subset& s) const {
  const auto idx = static_cast<Eigen::Index>(indexer_.index_of(s));
  if (kind_ != MatrixKind::H) return idx;
  if (idx == 0) throw std::out_of_range("H has no row for the empty set");
  return idx - 1;
}

double MomentMatrix::at(const Subset& a, const Subset& b) const {
  return values_(position(a), position(b));
}

namespace {

// Dense 0/1 adjacency for fast lookups inside the O(dim^2) loops.
class AdjacencyTable {
 public:
  explicit AdjacencyTable(const GraphInstance& g) : n_(g.n()), t_(static_cast<std::size_t>(n_ + 1) * (n_ + 1), 0) {
    for (auto [i, j] : g.edges()) {
      t_[idx(i, j)] = 1;
      t_[idx(j, i)] = 1;
    }
  }
  bool edge(int i, int j) const { return t_[idx(i, j)] != 0; }

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * (n_ + 1) + j; }
  int n_;
  std::vector<unsigned char> t_;
};

struct SmallSet {
  int v[4];
  int size = 0;
  void add(int x) {
    for (int i = 0; i < size; ++i)
      if (v[i] == x) return;
    v[size++] = x;
  }
};

bool is_clique(const AdjacencyTable& adj, const SmallSet& s) {
  for (int a = 0; a < s.size; ++a)
    for (int b = a + 1; b < s.size; ++b)
      if (!adj.edge(s.v[a], s.v[b])) return false;
  return true;
}

SmallSet union_of(const Subset& a, const Subset& b) {
  SmallSet u;
  if (a.size >= 1) u.add(a.first);
  if (a.size == 2) u.add(a.second);
  if (b.size >= 1) u.add(b.first);
  if (b.size == 2) u.add(b.second);
  return u;
}

double m_entry(const AdjacencyTable& adj, const WitnessParams& w, const Subset& a, const Subset& b) {
  const SmallSet u = union_of(a, b);
  return is_clique(adj, u) ? w.alpha[static_cast<std::size_t>(u.size)] : 0.0;
}

double n_entry(const AdjacencyTable& adj, const WitnessParams& w, const Subset& a, const Subset& b) {
  const SmallSet u = union_of(a, b);
  const auto ea = a.elements();
  const auto eb = b.elements();
  for (int i : ea) {
    if (b.contains(i)) continue;
    for (int j : eb) {
      if (a.contains(j)) continue;
      if (!adj.edge(i, j)) return 0.0;
    }
  }
  return w.alpha[static_cast<std::size_t>(u.size)];
}

}  // namespace

MomentMatrix build_matrix(const GraphInstance& g, const WitnessParams& params, MatrixKind kind) {
  SubsetIndexer idx(g.n());
  const AdjacencyTable adj(g);
  const auto dim = static_cast<Eigen::Index>(idx.dim());
  const Eigen::Index off = kind == MatrixKind::H ? 1 : 0;
  std::vector<Subset> sets(static_cast<std::size_t>(dim));
  for (Eigen::Index i = 0; i < dim; ++i) sets[static_cast<std::size_t>(i)] = idx.set_of(static_cast<std::size_t>(i));
  Eigen::MatrixXd v(dim - off, dim - off);
  for (Eigen::Index c = off; c < dim; ++c) {
    const Subset& b = sets[static_cast<std::size_t>(c)];
    for (Eigen::Index r = off; r <= c; ++r) {
      const Subset& a = sets[static_cast<std::size_t>(r)];
      double x = 0.0;
      switch (kind) {
        case MatrixKind::M:
          x = m_entry(adj, params, a, b);
          break;
        case MatrixKind::N:
          x = n_entry(adj, params, a, b);
          break;
        case MatrixKind::H:
          x = n_entry(adj, params, a, b) - params.a(a.size) * params.a(b.size);
          break;
      }
      v(r - off, c - off) = x;
      v(c - off, r - off) = x;
    }
  }
  return MomentMatrix(std::move(idx), kind, std::move(v));
}

CliqueRestricted build_clique_restricted_M(const GraphInstance& g, const WitnessParams& params) {
  const AdjacencyTable adj(g);
  CliqueRestricted out;
  out.sets.push_back(Subset::empty());
  for (int i = 1; i <= g.n(); ++i) out.sets.push_back(Subset::single(i));
  for (auto [i, j] : g.edges()) out.sets.push_back(Subset::pair(i, j));
  const auto d = static_cast<Eigen::Index>(out.sets.size());
  out.values.resize(d, d);
  for (Eigen::Index c = 0; c < d; ++c)
    for (Eigen::Index r = 0; r <= c; ++r) {
      const double x = m_entry(adj, params, out.sets[static_cast<std::size_t>(r)],
                               out.sets[static_cast<std::size_t>(c)]);
      out.values(r, c) = x;
      out.values(c, r) = x;
    }
  return out;
}

HBlocks extract_blocks(const MomentMatrix& h) {
  if (h.kind() != MatrixKind::H) throw std::invalid_argument("extract_blocks needs a matrix of kind H");
  const auto n = static_cast<Eigen::Index>(h.indexer().n());
  const auto m = h.size() - n;
  HBlocks b;
  b.h11 = h.values().topLeftCorner(n, n);
  b.h12 = h.values().topRightCorner(n, m);
  b.h22 = h.values().bottomRightCorner(m, m);
  return b;
}

MomentMatrix scale_witness(const MomentMatrix& m, double s) {
  if (m.kind() != MatrixKind::M) throw std::invalid_argument("scale_witness needs kind M");
  if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("scale must lie in [0, 1]");
  Eigen::MatrixXd v = s * m.values();
  v(0, 0) = 1.0;
  return MomentMatrix(m.indexer(), MatrixKind::M, std::move(v));
}

PsdReport witness_psd(const Eigen::MatrixXd& m, const PsdOptions& psd) {
  std::vector<Eigen::Index> keep;
  bool scalable = true;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double d = m(i, i);
    if (d > 0.0) {
      keep.push_back(i);
    } else if (d < 0.0 || m.row(i).cwiseAbs().maxCoeff() != 0.0) {
      scalable = false;
      break;
    }
  }
  if (!scalable) return psd_check(m, psd);
  const auto k = static_cast<Eigen::Index>(keep.size());
  if (k == 0) {
    PsdReport r;
    r.verdict = true;
    r.tol = psd.tol;
    r.method = PsdMethod::DenseEigendecomposition;
    return r;
  }
  Eigen::VectorXd dinv(k);
  for (Eigen::Index a = 0; a < k; ++a) dinv[a] = 1.0 / std::sqrt(m(keep[static_cast<std::size_t>(a)], keep[static_cast<std::size_t>(a)]));
  Eigen::MatrixXd s(k, k);
  for (Eigen::Index c = 0; c < k; ++c)
    for (Eigen::Index r = 0; r < k; ++r)
      s(r, c) = m(keep[static_cast<std::size_t>(r)], keep[static_cast<std::size_t>(c)]) * dinv[r] * dinv[c];
  return psd_check(s, psd);
}

FeasibilityReport check_sos_feasibility(const MomentMatrix& m, const GraphInstance& g, double tol,
                                        PsdOptions psd) {
  if (m.kind() != MatrixKind::M) throw std::invalid_argument("feasibility check needs kind M");
  if (m.indexer().n() != g.n()) throw std::invalid_argument("graph and matrix sizes differ");
  const AdjacencyTable adj(g);
  const auto& idx = m.indexer();
  const auto& v = m.values();
  const auto dim = v.rows();
  FeasibilityReport r;
  r.unit_corner = v(0, 0) == 1.0;
  r.entries_in_range = true;
  r.clique_support = true;
  r.union_symmetry = true;
  // Canonical value per union, keyed by its size and sorted labels (15 bits each).
  std::unordered_map<std::uint64_t, double> by_union;
  std::vector<Subset> sets(static_cast<std::size_t>(dim));
  for (Eigen::Index i = 0; i < dim; ++i) sets[static_cast<std::size_t>(i)] = idx.set_of(static_cast<std::size_t>(i));
  for (Eigen::Index c = 0; c < dim; ++c)
    for (Eigen::Index rr = 0; rr <= c; ++rr) {
      const double x = v(rr, c);
      if (x != v(c, rr)) r.union_symmetry = false;
      if (!(x >= 0.0 && x <= 1.0)) r.entries_in_range = false;
      SmallSet u = union_of(sets[static_cast<std::size_t>(rr)], sets[static_cast<std::size_t>(c)]);
      if (!is_clique(adj, u) && x != 0.0) r.clique_support = false;
      std::sort(u.v, u.v + u.size);
      std::uint64_t key = static_cast<std::uint64_t>(u.size);
      for (int t = 0; t < u.size; ++t) key = (key << 15) | static_cast<std::uint64_t>(u.v[t]);
      auto [it, inserted] = by_union.emplace(key, x);
      if (!inserted && it->second != x) r.union_symmetry = false;
    }
  for (int i = 1; i <= idx.n(); ++i) r.objective += v(i, i);
  psd.tol = tol;
  r.psd = witness_psd(v, psd);
  return r;
}

void write_matrix(std::ostream& os, const MomentMatrix& m, DumpFormat fmt) {
  const auto& v = m.values();
  os << m.indexer().n() << ' ' << v.rows() << ' ' << to_string(m.kind()) << '\n';
  if (fmt == DumpFormat::Text) {
    os << std::setprecision(17);
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      for (Eigen::Index c = r; c < v.cols(); ++c) {
        if (c > r) os << ' ';
        os << v(r, c);
      }
      os << '\n';
    }
    return;
  }
  for (Eigen::Index r = 0; r < v.rows(); ++r)
    for (Eigen::Index c = r; c < v.cols(); ++c) {
      const auto bits = std::bit_cast<std::uint64_t>(v(r, c));
      unsigned char buf[8];
      for (int b = 0; b < 8; ++b) buf[b] = static_cast<unsigned char>(bits >> (8 * b));
      os.write(reinterpret_cast<const char*>(buf), 8);
    }
}

Eigen::MatrixXd read_matrix(std::istream& is, DumpFormat fmt) {
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error("matrix dump: missing header");
  std::istringstream hs(header);
  int n = 0;
  Eigen::Index size = 0;
  std::string kind;
  if (!(hs >> n >> size >> kind)) throw std::runtime_error("matrix dump: bad header");
  Eigen::MatrixXd v(size, size);
  for (Eigen::Index r = 0; r < size; ++r)
    for (Eigen::Index c = r; c < size; ++c) {
      double x = 0.0;
      if (fmt == DumpFormat::Text) {
        if (!(is >> x)) throw std::runtime_error("matrix dump: truncated");
      } else {
        unsigned char buf[8];
        if (!is.read(reinterpret_cast<char*>(buf), 8)) throw std::runtime_error("matrix dump: truncated");
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(buf[b]) << (8 * b);
        x = std::bit_cast<double>(bits);
      }
      v(r, c) = v(c, r) = x;
    }
  return v;
}

}  // namespace sosw
