#include "sosw/subsets.hpp"

#include <algorithm>
#include <stdexcept>

namespace sosw {

VertexPair::VertexPair(int a, int b) : head(a), tail(b) {
  if (!(a < b)) {
    throw std::invalid_argument("VertexPair requires head < tail, got (" +
                                std::to_string(a) + ", " + std::to_string(b) + ")");
  }
}

Subset Subset::single(int i) {
  Subset s;
  s.size = 1;
  s.first = i;
  return s;
}

Subset Subset::pair(int i, int j) {
  if (i == j) throw std::invalid_argument("Subset::pair needs distinct vertices");
  Subset s;
  s.size = 2;
  s.first = std::min(i, j);
  s.second = std::max(i, j);
  return s;
}

Subset Subset::of(std::span<const int> vertices) {
  std::vector<int> v(vertices.begin(), vertices.end());
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  if (v.size() > 2) throw std::invalid_argument("subset has more than two elements");
  if (v.empty()) return empty();
  if (v.size() == 1) return single(v[0]);
  return pair(v[0], v[1]);
}

VertexPair Subset::as_pair() const {
  if (size != 2) throw std::logic_error("subset is not a pair");
  return VertexPair(first, second);
}

std::vector<int> Subset::elements() const {
  std::vector<int> out;
  if (size >= 1) out.push_back(first);
  if (size == 2) out.push_back(second);
  return out;
}

std::string Subset::to_string() const {
  switch (size) {
    case 0: return "{}";
    case 1: return "{" + std::to_string(first) + "}";
    default: return "{" + std::to_string(first) + "," + std::to_string(second) + "}";
  }
}

std::size_t subset_space_dim(int n) {
  if (n < 4) throw std::invalid_argument("subset space needs n >= 4");
  const auto nn = static_cast<std::size_t>(n);
  return 1 + nn + nn * (nn - 1) / 2;
}

SubsetIndexer::SubsetIndexer(int n) : n_(n), dim_(subset_space_dim(n)) {
  pairs_.reserve(dim_ - 1 - static_cast<std::size_t>(n));
  row_start_.resize(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    row_start_[static_cast<std::size_t>(i)] = pairs_.size();
    for (int j = i + 1; j <= n; ++j) pairs_.emplace_back(i, j);
  }
}

void SubsetIndexer::check_vertex(int v) const {
  if (v < 1 || v > n_) {
    throw std::out_of_range("vertex label " + std::to_string(v) + " outside [1, " +
                            std::to_string(n_) + "]");
  }
}

std::size_t SubsetIndexer::index_of(const Subset& s) const {
  switch (s.size) {
    case 0:
      return 0;
    case 1:
      check_vertex(s.first);
      return static_cast<std::size_t>(s.first);
    case 2:
      return first_pair_index() + pair_rank(s.first, s.second);
    default:
      throw std::invalid_argument("subset has more than two elements");
  }
}

std::size_t SubsetIndexer::index_of(std::span<const int> vertices) const {
  return index_of(Subset::of(vertices));
}

Subset SubsetIndexer::set_of(std::size_t index) const {
  if (index >= dim_) {
    throw std::out_of_range("index " + std::to_string(index) + " >= dim " +
                            std::to_string(dim_));
  }
  if (index == 0) return Subset::empty();
  if (index <= static_cast<std::size_t>(n_)) return Subset::single(static_cast<int>(index));
  const auto& p = pairs_[index - first_pair_index()];
  return Subset::pair(p.head, p.tail);
}

std::size_t SubsetIndexer::pair_rank(int i, int j) const {
  check_vertex(i);
  check_vertex(j);
  if (i == j) throw std::invalid_argument("pair needs distinct vertices");
  if (i > j) std::swap(i, j);
  return row_start_[static_cast<std::size_t>(i)] + static_cast<std::size_t>(j - i - 1);
}

const VertexPair& SubsetIndexer::pair_at(std::size_t rank) const {
  if (rank >= pairs_.size()) throw std::out_of_range("pair rank out of range");
  return pairs_[rank];
}

}  // namespace sosw
