#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "sosw/decomposition.hpp"
#include "sosw/witness.hpp"

namespace sosw {

enum class PrimitiveKind { Cycle, Bridge, Ribbon, StarRibbon, ConstrainedRibbon };
// Closed chains match Tr((X^T X)^m) (2m couples, wraparound); open chains
// carry 2m+1 couples and no wraparound.
enum class Topology { Closed, Open };
// Per-face identification in a star ribbon, read as (row couple, column couple).
enum class Junction { Heads, Tails, TailHead, HeadTail };

struct Couple {
  int head = 0;
  int tail = 0;
};

struct PrimitiveGraph {
  PrimitiveKind kind = PrimitiveKind::Cycle;
  Topology topology = Topology::Closed;
  int m = 0;
  int eta = 0;
  int nu = 0;
  int vertex_count = 0;
  std::vector<std::pair<int, int>> edges;  // multigraph, 0-based vertex ids
  std::vector<Couple> couples;             // label(head) < label(tail)
  // Label sets of the two vertex groups must be disjoint.
  std::vector<std::pair<std::vector<int>, std::vector<int>>> disjoint;
  std::string description;
};

PrimitiveGraph make_cycle(int length);
// Closed bridge with m couples and m singletons; `head_edges` / `tail_edges`
// select which couple ends connect to the singletons (both for L(2,1)).
PrimitiveGraph make_bridge(int m, bool head_edges = true, bool tail_edges = true,
                           bool restricted = false);
PrimitiveGraph make_ribbon(int eta, int nu, int m, Topology topology, bool restricted = false);
PrimitiveGraph make_star_ribbon(const std::vector<Junction>& faces);
// All col heads and row tails identified: the support of J~(3,2) - J(3,2).
PrimitiveGraph make_constrained_ribbon_32(int m);

// Convenience dispatcher: Cycle takes `m` as its length, the rest build the
// closed chains used by trace expansions.
PrimitiveGraph build_primitive(PrimitiveKind kind, int m, int eta = 0, int nu = 0,
                               Topology topology = Topology::Closed);

// Star-ribbon families of a closed chain with 2m faces: the two-way
// (heads/tails) family, or all four identification types.
std::vector<PrimitiveGraph> star_ribbon_family(int m, bool all_junctions);

struct LabelingPartition {
  std::vector<int> block_of;  // vertex -> block, restricted growth order
  int blocks = 0;
  std::vector<std::pair<int, int>> order_constraints;  // block precedence (head, tail)
};

struct EnumerationOptions {
  int max_vertices = 14;
};

std::vector<LabelingPartition> enumerate_contributing(const PrimitiveGraph& f,
                                                      const EnumerationOptions& opt = {});
int v_star(const PrimitiveGraph& f, const EnumerationOptions& opt = {});
// Number of contributing labelings l: V -> [n].
double count_contributing_labelings(const PrimitiveGraph& f, int n, const EnumerationOptions& opt = {});
// Same count by brute force over all n^|V| label maps.
double count_contributing_bruteforce(const PrimitiveGraph& f, int n);
std::size_t linear_extensions(int blocks, const std::vector<std::pair<int, int>>& order);

// Expected trace E Tr((X^T X)^m) for the random matrices of the decomposition.
enum class TraceFamily { H11Deviation, Component };

struct TraceTarget {
  TraceFamily family = TraceFamily::Component;
  ComponentKind kind;
  static TraceTarget h11() { return {TraceFamily::H11Deviation, {}}; }
  static TraceTarget component(ComponentKind k) { return {TraceFamily::Component, k}; }
  std::string name() const;
};

struct TraceComparison {
  double labeling_sum = 0.0;
  double all_graphs = 0.0;
  double rel_difference = 0.0;
};

// E[g^t] for g = Bernoulli(p) - p.
double centered_moment(double p, int t);
// The primitives whose labelings enumerate Tr((X^T X)^m), with prefactor beta.
std::vector<PrimitiveGraph> trace_primitives(const TraceTarget& t, int m);
double trace_prefactor(const TraceTarget& t, const WitnessParams& params);
TraceComparison exact_expected_trace(const TraceTarget& t, int m, int n, const WitnessParams& params);

struct TraceBoundParams {
  double c1 = 1.0, c2 = 1.0, c3 = 1.0, c4 = 1.0, c5 = 1.0;
  double gamma = 2.0;
  double beta = 1.0;
};

struct NormBound {
  double bound = 0.0;          // c4 * sqrt(exp(c1 Gamma) n^c1 (log n)^(c3 - c1))
  double bound_c5 = 0.0;       // same with c5 as the prefactor
  double failure_prob = 1.0;   // n^{-(Gamma - c2)/2}
  bool degenerate = false;     // Gamma == c2
};

NormBound norm_bound(const TraceBoundParams& params, double n);
// Constants for a primitive family with v_* <= c1 r + c2 and |V| = c3 r + c4.
TraceBoundParams gentrbnd_params(double c1, double c2, double c3, double c4, double beta,
                                 double gamma);

}  // namespace sosw
