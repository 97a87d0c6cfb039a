#include "sosw/models.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "sosw/rng.hpp"
#include "sosw/subsets.hpp"

namespace sosw {

namespace {

void check_size(int n) {
  if (n < 4) throw std::invalid_argument("graph size must be >= 4");
}

void check_p(double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("edge probability must lie in (0, 1]");
  }
}

std::size_t pair_total(int n) {
  return static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
}

}  // namespace

GraphInstance::GraphInstance(int n, double p, std::uint64_t seed)
    : n_(n), p_(p), seed_(seed), bits_((pair_total(n) + 63) / 64, 0) {
  check_size(n);
  check_p(p);
}

GraphInstance GraphInstance::from_edges(int n, double p,
                                        const std::vector<std::pair<int, int>>& edges) {
  GraphInstance g(n, p);
  for (auto [i, j] : edges) g.set_edge(i, j, true);
  return g;
}

GraphInstance GraphInstance::complete(int n, double p) {
  GraphInstance g(n, p);
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) g.set_edge(i, j, true);
  return g;
}

std::size_t GraphInstance::bit_of(int i, int j) const {
  if (i < 1 || i > n_ || j < 1 || j > n_) throw std::out_of_range("vertex label out of range");
  if (i == j) throw std::invalid_argument("no self loops");
  return pair_rank_unchecked(n_, i, j);
}

bool GraphInstance::edge(int i, int j) const {
  if (i == j) return false;
  const auto b = bit_of(i, j);
  return (bits_[b >> 6] >> (b & 63)) & 1ULL;
}

void GraphInstance::set_edge(int i, int j, bool present) {
  const auto b = bit_of(i, j);
  if (present) {
    bits_[b >> 6] |= (1ULL << (b & 63));
  } else {
    bits_[b >> 6] &= ~(1ULL << (b & 63));
  }
}

std::size_t GraphInstance::edge_count() const {
  std::size_t c = 0;
  for (auto w : bits_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::vector<std::pair<int, int>> GraphInstance::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 1; i <= n_; ++i)
    for (int j = i + 1; j <= n_; ++j)
      if (edge(i, j)) out.emplace_back(i, j);
  return out;
}

Eigen::MatrixXd GraphInstance::adjacency_matrix() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_, n_);
  for (int i = 1; i <= n_; ++i)
    for (int j = i + 1; j <= n_; ++j)
      if (edge(i, j)) a(i - 1, j - 1) = a(j - 1, i - 1) = 1.0;
  return a;
}

Eigen::MatrixXd GraphInstance::centered_matrix() const {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n_, n_);
  for (int i = 1; i <= n_; ++i)
    for (int j = i + 1; j <= n_; ++j) g(i - 1, j - 1) = g(j - 1, i - 1) = this->g(i, j);
  return g;
}

bool GraphInstance::operator==(const GraphInstance& o) const {
  return n_ == o.n_ && p_ == o.p_ && seed_ == o.seed_ && bits_ == o.bits_ &&
         planted_ == o.planted_;
}

GraphInstance sample_er(int n, double p, std::uint64_t seed) {
  GraphInstance g(n, p, seed);
  const CounterRng rng(seed, Stream::Edges);
  std::size_t rank = 0;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j, ++rank)
      if (rng.uniform(rank) < p) g.set_edge(i, j, true);
  return g;
}

std::vector<int> sample_subset(int n, int k, std::uint64_t seed) {
  if (k < 0 || k > n) throw std::invalid_argument("subset size must lie in [0, n]");
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 1);
  const CounterRng rng(seed, Stream::Planted);
  for (int t = 0; t < k; ++t) {
    const auto remaining = static_cast<std::uint64_t>(n - t);
    const auto pick = static_cast<std::size_t>(t) + rng.below(static_cast<std::uint64_t>(t), remaining);
    std::swap(perm[static_cast<std::size_t>(t)], perm[pick]);
  }
  std::vector<int> q(perm.begin(), perm.begin() + k);
  std::sort(q.begin(), q.end());
  return q;
}

GraphInstance sample_planted(int n, double p, int k, std::uint64_t seed) {
  check_size(n);
  if (k > n) throw std::invalid_argument("planted size k exceeds n");
  if (k < 4) throw std::invalid_argument("planted size k must be >= 4");
  GraphInstance g = sample_er(n, p, seed);
  auto q = sample_subset(n, k, seed);
  for (std::size_t a = 0; a < q.size(); ++a)
    for (std::size_t b = a + 1; b < q.size(); ++b) g.set_edge(q[a], q[b], true);
  g.set_planted(std::move(q));
  return g;
}

GaussianInstance sample_gaussian(int n, double mu, std::optional<int> k, Hypothesis h,
                                 std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("dimension must be positive");
  if (!(mu >= 0.0)) throw std::invalid_argument("mu must be >= 0");
  GaussianInstance inst;
  inst.n = n;
  inst.mu = mu;
  inst.hypothesis = h;
  inst.seed = seed;
  inst.A = Eigen::MatrixXd::Zero(n, n);
  const CounterRng rng(seed, Stream::Gaussian);
  std::size_t rank = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, ++rank) inst.A(i, j) = inst.A(j, i) = rng.normal(rank);
  if (h == Hypothesis::H1) {
    if (!k) throw std::invalid_argument("H1 requires a planted size k");
    if (*k < 1 || *k > n) throw std::invalid_argument("planted size k must lie in [1, n]");
    inst.k = *k;
    auto q = sample_subset(n, *k, seed);
    for (std::size_t a = 0; a < q.size(); ++a)
      for (std::size_t b = a + 1; b < q.size(); ++b) {
        inst.A(q[a] - 1, q[b] - 1) += mu;
        inst.A(q[b] - 1, q[a] - 1) += mu;
      }
    inst.planted = std::move(q);
  } else {
    inst.k = k.value_or(0);
  }
  return inst;
}

int clique_indicator(const GraphInstance& g, std::span<const int> vertices) {
  for (std::size_t a = 0; a < vertices.size(); ++a)
    for (std::size_t b = a + 1; b < vertices.size(); ++b)
      if (vertices[a] != vertices[b] && !g.edge(vertices[a], vertices[b])) return 0;
  return 1;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

GraphInstance threshold_graph(const GaussianInstance& inst, double lambda) {
  GraphInstance g(inst.n, normal_cdf(-lambda), inst.seed);
  for (int i = 1; i <= inst.n; ++i)
    for (int j = i + 1; j <= inst.n; ++j)
      if (inst.A(i - 1, j - 1) >= lambda) g.set_edge(i, j, true);
  if (inst.planted) g.set_planted(*inst.planted);
  return g;
}

void write_instance(std::ostream& os, const GraphInstance& g) {
  os << g.n() << ' ' << std::setprecision(17) << g.p() << ' ' << g.seed() << '\n';
  for (auto [i, j] : g.edges()) os << i << ' ' << j << '\n';
}

GraphInstance read_instance(std::istream& is) {
  int n = 0;
  double p = 0.0;
  std::uint64_t seed = 0;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("instance dump: missing header");
  std::istringstream header(line);
  if (!(header >> n >> p >> seed)) throw std::runtime_error("instance dump: bad header");
  GraphInstance g(n, p, seed);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    int i = 0, j = 0;
    if (!(row >> i >> j)) throw std::runtime_error("instance dump: bad edge line '" + line + "'");
    g.set_edge(i, j, true);
  }
  return g;
}

}  // namespace sosw
