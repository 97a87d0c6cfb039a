#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sosw {

// Unordered pair {head, tail} of 1-based vertex labels with head < tail.
struct VertexPair {
  int head = 1;
  int tail = 2;

  VertexPair() = default;
  VertexPair(int a, int b);

  bool operator==(const VertexPair&) const = default;
  bool contains(int v) const { return v == head || v == tail; }
  bool intersects(const VertexPair& o) const {
    return contains(o.head) || contains(o.tail);
  }
};

// Subset of [n] with at most two elements. Elements are kept sorted.
struct Subset {
  int size = 0;
  int first = 0;
  int second = 0;

  static Subset empty() { return {}; }
  static Subset single(int i);
  static Subset pair(int i, int j);
  static Subset of(std::span<const int> vertices);
  static Subset of(std::initializer_list<int> vertices) {
    return of(std::span<const int>(vertices.begin(), vertices.size()));
  }

  bool operator==(const Subset&) const = default;
  bool contains(int v) const {
    return (size >= 1 && first == v) || (size == 2 && second == v);
  }
  VertexPair as_pair() const;
  std::vector<int> elements() const;
  std::string to_string() const;
};

std::size_t subset_space_dim(int n);

// Canonical positions: 0 is the empty set, 1..n the singletons, then pairs
// in lexicographic order.
class SubsetIndexer {
 public:
  explicit SubsetIndexer(int n);

  int n() const { return n_; }
  std::size_t dim() const { return dim_; }
  std::size_t pair_count() const { return pairs_.size(); }
  std::size_t first_pair_index() const { return static_cast<std::size_t>(n_) + 1; }

  std::size_t index_of(const Subset& s) const;
  std::size_t index_of(std::span<const int> vertices) const;
  std::size_t index_of(std::initializer_list<int> vertices) const {
    return index_of(std::span<const int>(vertices.begin(), vertices.size()));
  }
  Subset set_of(std::size_t index) const;

  // Position of {i,j} within the pair block, 0-based.
  std::size_t pair_rank(int i, int j) const;
  const VertexPair& pair_at(std::size_t rank) const;
  const std::vector<VertexPair>& pairs() const { return pairs_; }

 private:
  void check_vertex(int v) const;

  int n_;
  std::size_t dim_;
  std::vector<VertexPair> pairs_;
  std::vector<std::size_t> row_start_;
};

// Rank of the pair {i,j} (i != j, 1-based) among the C(n,2) pairs, without
// range checks. Shared by the packed adjacency storage and the indexer.
inline std::size_t pair_rank_unchecked(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  const auto a = static_cast<std::size_t>(i - 1);
  const auto nn = static_cast<std::size_t>(n);
  return a * (2 * nn - a - 1) / 2 + static_cast<std::size_t>(j - i - 1);
}

}  // namespace sosw
