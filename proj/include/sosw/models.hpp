#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace sosw {

class GraphInstance {
 public:
  // Edgeless graph; edges are added with set_edge.
  GraphInstance(int n, double p, std::uint64_t seed = 0);

  static GraphInstance from_edges(int n, double p,
                                  const std::vector<std::pair<int, int>>& edges);
  static GraphInstance complete(int n, double p);

  int n() const { return n_; }
  double p() const { return p_; }
  std::uint64_t seed() const { return seed_; }

  bool edge(int i, int j) const;
  void set_edge(int i, int j, bool present);
  // Centered variable 𝒢_ij - p, zero on the diagonal.
  double g(int i, int j) const { return i == j ? 0.0 : (edge(i, j) ? 1.0 : 0.0) - p_; }
  std::size_t edge_count() const;
  std::vector<std::pair<int, int>> edges() const;

  const std::optional<std::vector<int>>& planted() const { return planted_; }
  void set_planted(std::vector<int> q) { planted_ = std::move(q); }

  Eigen::MatrixXd adjacency_matrix() const;
  Eigen::MatrixXd centered_matrix() const;

  bool operator==(const GraphInstance& o) const;

 private:
  std::size_t bit_of(int i, int j) const;

  int n_;
  double p_;
  std::uint64_t seed_;
  std::vector<std::uint64_t> bits_;
  std::optional<std::vector<int>> planted_;
};

enum class Hypothesis { H0, H1 };

struct GaussianInstance {
  int n = 0;
  double mu = 0.0;
  int k = 0;
  Hypothesis hypothesis = Hypothesis::H0;
  std::optional<std::vector<int>> planted;
  std::uint64_t seed = 0;
  Eigen::MatrixXd A;  // symmetric, zero diagonal
};

GraphInstance sample_er(int n, double p, std::uint64_t seed);
GraphInstance sample_planted(int n, double p, int k, std::uint64_t seed);
GaussianInstance sample_gaussian(int n, double mu, std::optional<int> k, Hypothesis h,
                                 std::uint64_t seed);

// Uniform k-subset of [n] (sorted, 1-based) drawn from the planted stream.
std::vector<int> sample_subset(int n, int k, std::uint64_t seed);

// 1 iff every pair of distinct vertices in `vertices` is an edge.
int clique_indicator(const GraphInstance& g, std::span<const int> vertices);

// Graph with edges {A_ij > lambda}; edge probability is Phi(-lambda) under H0.
GraphInstance threshold_graph(const GaussianInstance& inst, double lambda);
double normal_cdf(double x);

// Plain-text dump: header "n p seed", then one "i j" line per edge.
void write_instance(std::ostream& os, const GraphInstance& g);
GraphInstance read_instance(std::istream& is);

}  // namespace sosw
