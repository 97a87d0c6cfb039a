#include "sosw/labelings.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "sosw/models.hpp"

namespace sosw {

namespace {

// Orientation of face k in a chain c_0, c_1, ...: even faces read (row = c_{k+1},
// col = c_k), odd faces (row = c_k, col = c_{k+1}), matching
// Tr((X^T X)^m) = sum prod_i X(R_i, C_i) X(R_i, C_{i+1}).
void face_roles(int k, int a, int b, int& row, int& col) {
  if (k % 2 == 0) {
    row = b;
    col = a;
  } else {
    row = a;
    col = b;
  }
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

// Relabels vertex ids so that they are 0..k-1 in order of first appearance.
void compact(PrimitiveGraph& f, UnionFind& uf, int raw) {
  std::vector<int> id(static_cast<std::size_t>(raw), -1);
  int next = 0;
  auto map = [&](int v) {
    const int r = uf.find(v);
    if (id[static_cast<std::size_t>(r)] < 0) id[static_cast<std::size_t>(r)] = next++;
    return id[static_cast<std::size_t>(r)];
  };
  for (auto& c : f.couples) {
    c.head = map(c.head);
    c.tail = map(c.tail);
  }
  for (auto& e : f.edges) {
    e.first = map(e.first);
    e.second = map(e.second);
  }
  for (auto& d : f.disjoint) {
    for (auto& v : d.first) v = map(v);
    for (auto& v : d.second) v = map(v);
  }
  for (int v = 0; v < raw; ++v) map(v);
  f.vertex_count = next;
}

}  // namespace

PrimitiveGraph make_cycle(int length) {
  if (length < 2) throw std::invalid_argument("cycle length must be >= 2");
  PrimitiveGraph f;
  f.kind = PrimitiveKind::Cycle;
  f.m = length;
  f.vertex_count = length;
  for (int i = 0; i < length; ++i) f.edges.emplace_back(i, (i + 1) % length);
  f.description = "cycle(" + std::to_string(length) + ")";
  return f;
}

PrimitiveGraph make_bridge(int m, bool head_edges, bool tail_edges, bool restricted) {
  if (m < 1) throw std::invalid_argument("bridge needs m >= 1");
  if (!head_edges && !tail_edges) throw std::invalid_argument("bridge needs at least one edge type");
  PrimitiveGraph f;
  f.kind = PrimitiveKind::Bridge;
  f.m = m;
  f.vertex_count = 3 * m;
  // singleton u_l = l, couple l = (m + 2l, m + 2l + 1)
  for (int l = 0; l < m; ++l) {
    const int h = m + 2 * l, t = h + 1;
    const int u0 = l, u1 = (l + 1) % m;
    f.couples.push_back({h, t});
    for (int u : {u0, u1}) {
      if (head_edges) f.edges.emplace_back(u, h);
      if (tail_edges) f.edges.emplace_back(u, t);
    }
    if (restricted) {
      f.disjoint.push_back({{u0}, {h, t}});
      if (u1 != u0) f.disjoint.push_back({{u1}, {h, t}});
    }
  }
  f.description = "bridge(m=" + std::to_string(m) + ")";
  return f;
}

PrimitiveGraph make_ribbon(int eta, int nu, int m, Topology topology, bool restricted) {
  if (m < 1) throw std::invalid_argument("ribbon needs m >= 1");
  const unsigned mask = face_edges(eta, nu);
  PrimitiveGraph f;
  f.kind = PrimitiveKind::Ribbon;
  f.topology = topology;
  f.m = m;
  f.eta = eta;
  f.nu = nu;
  const int count = topology == Topology::Closed ? 2 * m : 2 * m + 1;
  f.vertex_count = 2 * count;
  for (int k = 0; k < count; ++k) f.couples.push_back({2 * k, 2 * k + 1});
  for (int k = 0; k < 2 * m; ++k) {
    int row = 0, col = 0;
    face_roles(k, k, (k + 1) % count, row, col);
    const Couple R = f.couples[static_cast<std::size_t>(row)];
    const Couple C = f.couples[static_cast<std::size_t>(col)];
    if (mask & kHH) f.edges.emplace_back(R.head, C.head);
    if (mask & kHT) f.edges.emplace_back(R.head, C.tail);
    if (mask & kTH) f.edges.emplace_back(R.tail, C.head);
    if (mask & kTT) f.edges.emplace_back(R.tail, C.tail);
    if (restricted) f.disjoint.push_back({{R.head, R.tail}, {C.head, C.tail}});
  }
  f.description = std::string(topology == Topology::Closed ? "closed" : "open") + " ribbon(" +
                  std::to_string(eta) + "," + std::to_string(nu) + ", m=" + std::to_string(m) + ")";
  return f;
}

PrimitiveGraph make_star_ribbon(const std::vector<Junction>& faces) {
  if (faces.empty() || faces.size() % 2 != 0) throw std::invalid_argument("star ribbon needs 2m faces");
  const int count = static_cast<int>(faces.size());
  PrimitiveGraph f;
  f.kind = PrimitiveKind::StarRibbon;
  f.m = count / 2;
  for (int k = 0; k < count; ++k) f.couples.push_back({2 * k, 2 * k + 1});
  UnionFind uf(2 * count);
  std::string code;
  for (int k = 0; k < count; ++k) {
    int row = 0, col = 0;
    face_roles(k, k, (k + 1) % count, row, col);
    const Couple R = f.couples[static_cast<std::size_t>(row)];
    const Couple C = f.couples[static_cast<std::size_t>(col)];
    switch (faces[static_cast<std::size_t>(k)]) {
      case Junction::Heads:
        uf.unite(R.head, C.head);
        f.edges.emplace_back(R.tail, C.tail);
        code += 'h';
        break;
      case Junction::Tails:
        uf.unite(R.tail, C.tail);
        f.edges.emplace_back(R.head, C.head);
        code += 't';
        break;
      case Junction::TailHead:
        uf.unite(R.tail, C.head);
        f.edges.emplace_back(R.head, C.tail);
        code += 'x';
        break;
      case Junction::HeadTail:
        uf.unite(R.head, C.tail);
        f.edges.emplace_back(R.tail, C.head);
        code += 'y';
        break;
    }
  }
  compact(f, uf, 2 * count);
  f.description = "star ribbon(" + code + ")";
  return f;
}

PrimitiveGraph make_constrained_ribbon_32(int m) {
  if (m < 1) throw std::invalid_argument("constrained ribbon needs m >= 1");
  PrimitiveGraph f;
  f.kind = PrimitiveKind::ConstrainedRibbon;
  f.m = m;
  f.eta = 3;
  f.nu = 2;
  const int count = 2 * m;
  for (int k = 0; k < count; ++k) f.couples.push_back({2 * k, 2 * k + 1});
  UnionFind uf(2 * count);
  const unsigned mask = face_edges(3, 2);
  for (int k = 0; k < count; ++k) {
    int row = 0, col = 0;
    face_roles(k, k, (k + 1) % count, row, col);
    const Couple R = f.couples[static_cast<std::size_t>(row)];
    const Couple C = f.couples[static_cast<std::size_t>(col)];
    uf.unite(R.tail, C.head);
    if (mask & kHH) f.edges.emplace_back(R.head, C.head);
    if (mask & kHT) f.edges.emplace_back(R.head, C.tail);
    if (mask & kTH) f.edges.emplace_back(R.tail, C.head);
    if (mask & kTT) f.edges.emplace_back(R.tail, C.tail);
  }
  compact(f, uf, 2 * count);
  f.description = "constrained ribbon(3,2, m=" + std::to_string(m) + ")";
  return f;
}

PrimitiveGraph build_primitive(PrimitiveKind kind, int m, int eta, int nu, Topology topology) {
  switch (kind) {
    case PrimitiveKind::Cycle: return make_cycle(m);
    case PrimitiveKind::Bridge: return make_bridge(m);
    case PrimitiveKind::Ribbon: return make_ribbon(eta, nu, m, topology);
    case PrimitiveKind::StarRibbon: {
      if (eta != 0 && !(eta == 2 && nu == 1)) throw std::invalid_argument("star ribbons derive from (2,1)");
      return make_star_ribbon(std::vector<Junction>(static_cast<std::size_t>(2 * m), Junction::Heads));
    }
    case PrimitiveKind::ConstrainedRibbon: return make_constrained_ribbon_32(m);
  }
  throw std::invalid_argument("unknown primitive kind");
}

std::vector<PrimitiveGraph> star_ribbon_family(int m, bool all_junctions) {
  if (m < 1) throw std::invalid_argument("star ribbon family needs m >= 1");
  const int faces = 2 * m;
  const int base = all_junctions ? 4 : 2;
  std::size_t total = 1;
  for (int k = 0; k < faces; ++k) total *= static_cast<std::size_t>(base);
  std::vector<PrimitiveGraph> out;
  out.reserve(total);
  std::vector<Junction> j(static_cast<std::size_t>(faces));
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (int k = 0; k < faces; ++k) {
      j[static_cast<std::size_t>(k)] = static_cast<Junction>(c % static_cast<std::size_t>(base));
      c /= static_cast<std::size_t>(base);
    }
    out.push_back(make_star_ribbon(j));
  }
  return out;
}

namespace {

bool acyclic(int blocks, const std::vector<std::pair<int, int>>& order) {
  std::vector<int> indeg(static_cast<std::size_t>(blocks), 0);
  std::vector<std::vector<int>> out(static_cast<std::size_t>(blocks));
  for (auto [a, b] : order) {
    if (a == b) return false;
    out[static_cast<std::size_t>(a)].push_back(b);
    ++indeg[static_cast<std::size_t>(b)];
  }
  std::vector<int> stack;
  for (int v = 0; v < blocks; ++v)
    if (indeg[static_cast<std::size_t>(v)] == 0) stack.push_back(v);
  int seen = 0;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    ++seen;
    for (int w : out[static_cast<std::size_t>(v)])
      if (--indeg[static_cast<std::size_t>(w)] == 0) stack.push_back(w);
  }
  return seen == blocks;
}

bool groups_disjoint(const PrimitiveGraph& f, const std::vector<int>& label) {
  for (const auto& [a, b] : f.disjoint)
    for (int x : a)
      for (int y : b)
        if (label[static_cast<std::size_t>(x)] == label[static_cast<std::size_t>(y)]) return false;
  return true;
}

// Multiplicity of each labeled edge; false if some edge has equal endpoint labels.
bool edge_multiplicities(const PrimitiveGraph& f, const std::vector<int>& label,
                         std::map<std::pair<int, int>, int>& mult) {
  mult.clear();
  for (auto [u, v] : f.edges) {
    int a = label[static_cast<std::size_t>(u)], b = label[static_cast<std::size_t>(v)];
    if (a == b) return false;
    if (a > b) std::swap(a, b);
    ++mult[{a, b}];
  }
  return true;
}

bool couples_ordered(const PrimitiveGraph& f, const std::vector<int>& label) {
  for (const auto& c : f.couples)
    if (!(label[static_cast<std::size_t>(c.head)] < label[static_cast<std::size_t>(c.tail)])) return false;
  return true;
}

}  // namespace

std::size_t linear_extensions(int blocks, const std::vector<std::pair<int, int>>& order) {
  if (blocks > 20) throw std::invalid_argument("too many blocks for linear-extension counting");
  std::vector<unsigned> pred(static_cast<std::size_t>(blocks), 0);
  for (auto [a, b] : order) pred[static_cast<std::size_t>(b)] |= 1u << a;
  std::vector<std::size_t> ways(std::size_t{1} << blocks, 0);
  ways[0] = 1;
  for (std::size_t s = 0; s < ways.size(); ++s) {
    if (ways[s] == 0) continue;
    for (int x = 0; x < blocks; ++x) {
      if (s & (std::size_t{1} << x)) continue;
      if ((pred[static_cast<std::size_t>(x)] & ~static_cast<unsigned>(s)) != 0) continue;
      ways[s | (std::size_t{1} << x)] += ways[s];
    }
  }
  return ways.back();
}

std::vector<LabelingPartition> enumerate_contributing(const PrimitiveGraph& f, const EnumerationOptions& opt) {
  const int nv = f.vertex_count;
  if (nv > opt.max_vertices) {
    throw std::length_error("primitive has " + std::to_string(nv) + " vertices, budget is " +
                            std::to_string(opt.max_vertices));
  }
  // Earlier neighbors per vertex, for pruning equal-label edge endpoints.
  std::vector<std::vector<int>> earlier(static_cast<std::size_t>(nv));
  for (auto [u, v] : f.edges) {
    if (u == v) continue;
    earlier[static_cast<std::size_t>(std::max(u, v))].push_back(std::min(u, v));
  }
  for (const auto& c : f.couples) {
    if (c.head == c.tail) return {};
    earlier[static_cast<std::size_t>(std::max(c.head, c.tail))].push_back(std::min(c.head, c.tail));
  }
  for (auto [u, v] : f.edges)
    if (u == v) return {};

  std::vector<LabelingPartition> out;
  std::vector<int> block(static_cast<std::size_t>(nv), -1);
  std::map<std::pair<int, int>, int> mult;
  auto finish = [&](int blocks) {
    if (!groups_disjoint(f, block)) return;
    if (!edge_multiplicities(f, block, mult)) return;
    for (const auto& [e, c] : mult)
      if (c < 2) return;
    std::vector<std::pair<int, int>> order;
    for (const auto& c : f.couples) order.emplace_back(block[static_cast<std::size_t>(c.head)], block[static_cast<std::size_t>(c.tail)]);
    std::sort(order.begin(), order.end());
    order.erase(std::unique(order.begin(), order.end()), order.end());
    if (!acyclic(blocks, order)) return;
    out.push_back({block, blocks, std::move(order)});
  };
  auto rec = [&](auto&& self, int v, int blocks) -> void {
    if (v == nv) {
      finish(blocks);
      return;
    }
    for (int b = 0; b <= blocks; ++b) {
      bool ok = true;
      for (int u : earlier[static_cast<std::size_t>(v)])
        if (block[static_cast<std::size_t>(u)] == b) {
          ok = false;
          break;
        }
      if (!ok) continue;
      block[static_cast<std::size_t>(v)] = b;
      self(self, v + 1, b == blocks ? blocks + 1 : blocks);
    }
    block[static_cast<std::size_t>(v)] = -1;
  };
  rec(rec, 0, 0);
  return out;
}

int v_star(const PrimitiveGraph& f, const EnumerationOptions& opt) {
  int best = 0;
  for (const auto& p : enumerate_contributing(f, opt)) best = std::max(best, p.blocks);
  return best;
}

namespace {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

}  // namespace

double count_contributing_labelings(const PrimitiveGraph& f, int n, const EnumerationOptions& opt) {
  double total = 0.0;
  for (const auto& p : enumerate_contributing(f, opt))
    total += binom(n, p.blocks) * static_cast<double>(linear_extensions(p.blocks, p.order_constraints));
  return total;
}

namespace {

// Visits every label map V -> [1..n].
template <class F>
void for_each_labeling(int nv, int n, F&& fn) {
  std::vector<int> label(static_cast<std::size_t>(nv), 1);
  while (true) {
    fn(label);
    int i = 0;
    while (i < nv && label[static_cast<std::size_t>(i)] == n) label[static_cast<std::size_t>(i++)] = 1;
    if (i == nv) return;
    ++label[static_cast<std::size_t>(i)];
  }
}

}  // namespace

double count_contributing_bruteforce(const PrimitiveGraph& f, int n) {
  if (std::pow(static_cast<double>(n), f.vertex_count) > 5e8) throw std::length_error("brute force too large");
  double count = 0.0;
  std::map<std::pair<int, int>, int> mult;
  for_each_labeling(f.vertex_count, n, [&](const std::vector<int>& label) {
    if (!couples_ordered(f, label) || !groups_disjoint(f, label)) return;
    if (!edge_multiplicities(f, label, mult)) return;
    for (const auto& [e, c] : mult)
      if (c < 2) return;
    count += 1.0;
  });
  return count;
}

std::string TraceTarget::name() const {
  return family == TraceFamily::H11Deviation ? "H11-E{H11}" : kind.name();
}

double centered_moment(double p, int t) {
  return p * std::pow(1.0 - p, t) + (1.0 - p) * std::pow(-p, t);
}

std::vector<PrimitiveGraph> trace_primitives(const TraceTarget& t, int m) {
  if (t.family == TraceFamily::H11Deviation) return {make_cycle(2 * m)};
  const auto& k = t.kind;
  k.validate();
  switch (k.family) {
    case Family::K: return star_ribbon_family(m, true);
    case Family::J: return {make_ribbon(k.eta, k.nu, m, Topology::Closed, true)};
    case Family::Jtilde: return {make_ribbon(k.eta, k.nu, m, Topology::Closed, false)};
    case Family::L:
      if (k.eta == 2) return {make_bridge(m, true, true, true)};
      return {make_bridge(m, k.nu == 1, k.nu == 2, true)};
  }
  throw std::invalid_argument("unknown trace target");
}

double trace_prefactor(const TraceTarget& t, const WitnessParams& w) {
  return t.family == TraceFamily::H11Deviation ? w.a(2) : component_prefactor(t.kind, w);
}

TraceComparison exact_expected_trace(const TraceTarget& t, int m, int n, const WitnessParams& w) {
  if (n < 4 || n > 6 || m < 1 || m > 2) throw std::length_error("exact traces are limited to n in [4,6], m in [1,2]");
  const double beta = trace_prefactor(t, w);
  const double p = w.p;
  TraceComparison out;

  // (a) labeling sum over all label maps of every primitive.
  std::vector<double> moment(64);
  for (int s = 0; s < 64; ++s) moment[static_cast<std::size_t>(s)] = centered_moment(p, s);
  long double sum = 0.0L;
  std::map<std::pair<int, int>, int> mult;
  for (const auto& f : trace_primitives(t, m)) {
    if (std::pow(static_cast<double>(n), f.vertex_count) > 5e7) throw std::length_error("labeling sum too large");
    bool degenerate = false;
    for (const auto& c : f.couples) degenerate |= c.head == c.tail;
    if (degenerate) continue;
    for_each_labeling(f.vertex_count, n, [&](const std::vector<int>& label) {
      if (!couples_ordered(f, label) || !groups_disjoint(f, label)) return;
      if (!edge_multiplicities(f, label, mult)) return;
      long double term = 1.0L;
      for (const auto& [e, c] : mult) term *= moment[static_cast<std::size_t>(c)];
      sum += term;
    });
  }
  out.labeling_sum = static_cast<double>(sum * std::pow(static_cast<long double>(beta), 2 * m));

  // (b) exact average over all graphs.
  const int pairs = n * (n - 1) / 2;
  long double avg = 0.0L;
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << pairs); ++code) {
    GraphInstance g(n, p);
    int r = 0, edges = 0;
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j, ++r)
        if (code >> r & 1ULL) {
          g.set_edge(i, j, true);
          ++edges;
        }
    const long double weight =
        std::pow(static_cast<long double>(p), edges) * std::pow(static_cast<long double>(1.0 - p), pairs - edges);
    if (weight == 0.0L) continue;
    Eigen::MatrixXd x = t.family == TraceFamily::H11Deviation ? Eigen::MatrixXd(w.a(2) * g.centered_matrix())
                                                                : build_component(g, w, t.kind).values;
    const Eigen::MatrixXd gram = x.transpose() * x;
    Eigen::MatrixXd power = gram;
    for (int s = 1; s < m; ++s) power = power * gram;
    avg += weight * static_cast<long double>(power.trace());
  }
  out.all_graphs = static_cast<double>(avg);
  const double scale = std::max(std::abs(out.labeling_sum), std::abs(out.all_graphs));
  out.rel_difference = scale == 0.0 ? 0.0 : std::abs(out.labeling_sum - out.all_graphs) / scale;
  return out;
}

NormBound norm_bound(const TraceBoundParams& q, double n) {
  if (!(n >= 3.0)) throw std::invalid_argument("norm_bound needs n >= 3");
  for (double c : {q.c1, q.c2, q.c3, q.c4, q.c5})
    if (!(c >= 0.0)) throw std::invalid_argument("constants must be nonnegative");
  if (q.c2 < q.c4) throw std::invalid_argument("norm_bound needs c2 >= c4");
  if (q.gamma < q.c2) throw std::invalid_argument("norm_bound needs Gamma > c2");
  NormBound b;
  const double core = std::sqrt(std::exp(q.c1 * q.gamma) * std::pow(n, q.c1) * std::pow(std::log(n), q.c3 - q.c1));
  b.bound = q.c4 * core;
  b.bound_c5 = q.c5 * core;
  b.degenerate = q.gamma == q.c2;
  b.failure_prob = b.degenerate ? 1.0 : std::pow(n, -(q.gamma - q.c2) / 2.0);
  return b;
}

TraceBoundParams gentrbnd_params(double c1, double c2, double c3, double c4, double beta, double gamma) {
  if (c3 > 2.0 * c1) throw std::invalid_argument("gentrbnd needs c3 <= 2 c1");
  TraceBoundParams q;
  q.c1 = c1;
  q.c2 = c2;
  q.c3 = c3;
  q.c4 = c4;
  q.c5 = beta;
  q.beta = beta;
  q.gamma = gamma;
  return q;
}

}  // namespace sosw
