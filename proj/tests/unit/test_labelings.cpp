#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "sosw/labelings.hpp"

using namespace sosw;

namespace {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Brute-force linear extensions by permutation enumeration.
std::size_t extensions_bruteforce(int blocks, const std::vector<std::pair<int, int>>& order) {
  std::vector<int> perm(static_cast<std::size_t>(blocks));
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t count = 0;
  do {
    std::vector<int> pos(static_cast<std::size_t>(blocks));
    for (int i = 0; i < blocks; ++i) pos[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = i;
    bool ok = true;
    for (auto [a, b] : order) ok = ok && pos[static_cast<std::size_t>(a)] < pos[static_cast<std::size_t>(b)];
    if (ok) ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return count;
}

}  // namespace

TEST_SUITE("labelings") {
  TEST_CASE("primitive shapes") {
    const auto c = make_cycle(6);
    CHECK(c.vertex_count == 6);
    CHECK(c.edges.size() == 6);
    const auto b = make_bridge(2);
    CHECK(b.vertex_count == 6);
    CHECK(b.edges.size() == 8);
    CHECK(b.couples.size() == 2);
    const auto r = make_ribbon(4, 1, 1, Topology::Open);
    CHECK(r.vertex_count == 6);
    CHECK(r.edges.size() == 8);  // two faces, four edges each
    CHECK(make_ribbon(4, 1, 2, Topology::Open).vertex_count == 10);
    CHECK(make_ribbon(2, 3, 2, Topology::Closed).vertex_count == 8);
    CHECK(make_ribbon(2, 3, 2, Topology::Closed).edges.size() == 8);
    CHECK(make_constrained_ribbon_32(3).vertex_count == 7);
    CHECK(star_ribbon_family(2, false).size() == 16);
    CHECK(star_ribbon_family(2, true).size() == 256);
    CHECK_THROWS(make_ribbon(2, 7, 1, Topology::Open));
    CHECK_THROWS(make_cycle(1));
    CHECK_THROWS(make_bridge(0));
    CHECK(build_primitive(PrimitiveKind::Cycle, 6).edges.size() == 6);
  }

  TEST_CASE("enumeration examples") {
    // Cycle of length 4 folded onto one doubled edge.
    const auto parts = enumerate_contributing(make_cycle(4));
    const bool folded = std::any_of(parts.begin(), parts.end(), [](const LabelingPartition& p) { return p.blocks == 2; });
    CHECK(folded);

    // Ribbon (4,1) with one face: all labels distinct leaves every edge single.
    PrimitiveGraph one_face = make_ribbon(4, 1, 1, Topology::Open);
    one_face.edges.resize(4);
    one_face.couples.resize(2);
    one_face.vertex_count = 4;
    CHECK(enumerate_contributing(one_face).empty());

    const auto b = make_bridge(1);
    CHECK(count_contributing_labelings(b, 5) == count_contributing_bruteforce(b, 5));
    EnumerationOptions tight;
    tight.max_vertices = 5;
    CHECK_THROWS_AS(enumerate_contributing(make_cycle(6), tight), std::length_error);
  }

  TEST_CASE("partition counts agree with brute force") {
    const std::vector<std::pair<PrimitiveGraph, int>> cases = {
        {make_cycle(4), 5},
        {make_cycle(6), 4},
        {make_bridge(2), 4},
        {make_ribbon(1, 2, 1, Topology::Open), 4},
        {make_ribbon(2, 1, 1, Topology::Closed), 5},
        {make_ribbon(3, 2, 1, Topology::Closed, true), 5},
        {make_constrained_ribbon_32(2), 5},
        {make_star_ribbon({Junction::Heads, Junction::TailHead}), 5},
    };
    for (const auto& [f, n] : cases) CHECK(count_contributing_labelings(f, n) == count_contributing_bruteforce(f, n));
  }

  TEST_CASE("linear extensions") {
    CHECK(linear_extensions(4, {}) == 24);
    CHECK(linear_extensions(3, {{0, 1}, {1, 2}}) == 1);
    const std::vector<std::pair<int, int>> order = {{0, 2}, {1, 2}, {3, 4}, {2, 5}};
    CHECK(linear_extensions(6, order) == extensions_bruteforce(6, order));
  }

  TEST_CASE("v_star claims") {
    CHECK(v_star(make_cycle(4)) == 3);
    CHECK(v_star(make_bridge(2)) == 5);
    CHECK(v_star(make_ribbon(1, 1, 1, Topology::Open)) == 5);
    for (int m = 1; m <= 4; ++m) CHECK(v_star(make_cycle(2 * m)) == m + 1);
    for (int m = 1; m <= 3; ++m) CHECK(v_star(make_bridge(m)) == 2 * m + 1);
    for (int m = 1; m <= 2; ++m) CHECK(v_star(make_ribbon(4, 1, m, Topology::Open)) == 2 * m + 2);
    for (int nu = 1; nu <= 4; ++nu) CHECK(v_star(make_ribbon(1, nu, 2, Topology::Open)) == 8);
    for (int m = 1; m <= 3; ++m) CHECK(v_star(make_constrained_ribbon_32(m)) == m + 2);
    for (int m = 1; m <= 2; ++m)
      for (const auto& f : star_ribbon_family(m, true)) CHECK(v_star(f) <= m + 2);
  }

  TEST_CASE("labeling count bound") {
    for (const auto& f : {make_cycle(6), make_bridge(2), make_ribbon(4, 1, 1, Topology::Open), make_constrained_ribbon_32(2)}) {
      const int vs = v_star(f);
      for (int n : {vs, vs + 3, 12})
        CHECK(count_contributing_labelings(f, n) <= binom(n, vs) * std::pow(vs, f.vertex_count));
    }
  }

  TEST_CASE("centered moments") {
    CHECK(centered_moment(0.3, 0) == doctest::Approx(1.0));
    CHECK(centered_moment(0.3, 1) == doctest::Approx(0.0).epsilon(1e-16));
    CHECK(centered_moment(0.3, 2) == doctest::Approx(0.21));
    CHECK(centered_moment(0.3, 3) == doctest::Approx(0.3 * 0.7 * (0.7 - 0.3)));
  }

  TEST_CASE("dual trace oracle") {
    const std::vector<TraceTarget> targets = {
        TraceTarget::h11(),
        TraceTarget::component(ComponentKind::k()),
        TraceTarget::component(ComponentKind::j(4, 1)),
        TraceTarget::component(ComponentKind::j(2, 1)),
        TraceTarget::component(ComponentKind::j(3, 2)),
        TraceTarget::component(ComponentKind::jtilde(1, 2)),
        TraceTarget::component(ComponentKind::jtilde(2, 4)),
        TraceTarget::component(ComponentKind::l(1, 1)),
        TraceTarget::component(ComponentKind::l(1, 2)),
        TraceTarget::component(ComponentKind::l(2, 1)),
    };
    for (double p : {0.5, 0.3})
      for (const auto& t : targets)
        for (int n : {4, 5})
          for (int m : {1, 2}) {
            const auto r = exact_expected_trace(t, m, n, derive_alphas(0.2, p));
            INFO(t.name(), " n=", n, " m=", m, " p=", p);
            CHECK(r.rel_difference <= 1e-12);
            CHECK(r.all_graphs > 0.0);
          }
    // K with a zero prefactor.
    const auto zero = explicit_alphas(0.5, 0.1, 0.02, 0.0, 0.001);
    const auto r = exact_expected_trace(TraceTarget::component(ComponentKind::k()), 1, 5, zero);
    CHECK(r.labeling_sum == 0.0);
    CHECK(r.all_graphs == 0.0);
    CHECK_THROWS(exact_expected_trace(TraceTarget::h11(), 3, 5, zero));
    CHECK_THROWS(exact_expected_trace(TraceTarget::h11(), 1, 7, zero));
  }

  TEST_CASE("norm bound") {
    TraceBoundParams q;
    q.c1 = 1;
    q.c2 = q.c3 = q.c4 = q.c5 = 1;
    q.gamma = 3;
    const double n = std::exp(std::exp(1.0));
    const auto b = norm_bound(q, n);
    CHECK(b.bound == doctest::Approx(std::sqrt(std::exp(3.0) * std::exp(std::exp(1.0)))).epsilon(1e-13));
    CHECK(b.failure_prob == doctest::Approx(std::pow(n, -1.0)).epsilon(1e-13));
    CHECK_FALSE(b.degenerate);

    q.gamma = 1;
    const auto d = norm_bound(q, n);
    CHECK(d.degenerate);
    CHECK(d.failure_prob == 1.0);
    q.gamma = 0.5;
    CHECK_THROWS(norm_bound(q, n));
    q.gamma = 3;
    q.c4 = 2;
    CHECK_THROWS(norm_bound(q, n));
    q.c4 = 1;
    CHECK_THROWS(norm_bound(q, 2.0));

    // With c3 = 2 c1 the bound is beta (n log n)^{c1/2} up to a constant.
    const auto gp = gentrbnd_params(1.5, 2.0, 3.0, 2.0, 0.01, 12.0);
    std::vector<double> ratio;
    for (double nn : {1e2, 1e4, 1e6}) {
      const double nbar = nn * std::log(nn);
      ratio.push_back(norm_bound(gp, nn).bound_c5 / (0.01 * std::pow(nbar, 0.75)));
    }
    CHECK(ratio[0] == doctest::Approx(ratio[1]).epsilon(1e-12));
    CHECK(ratio[1] == doctest::Approx(ratio[2]).epsilon(1e-12));
    CHECK_THROWS(gentrbnd_params(1.0, 2.0, 2.5, 1.0, 1.0, 12.0));
  }
}
