#include <bit>
#include <cmath>
#include <set>

#include "doctest.h"
#include "sosw/decomposition.hpp"
#include "sosw/models.hpp"
#include "sosw/rng.hpp"
#include "sosw/spectral.hpp"
#include "sosw/subsets.hpp"

using namespace sosw;

namespace {

Eigen::VectorXd random_vector(Eigen::Index dim, std::uint64_t seed) {
  CounterRng rng(seed, Stream::Aux);
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = rng.normal(static_cast<std::uint64_t>(i));
  return v;
}

// Direct transcription of the component definitions, entry by entry.
double oracle_entry(const GraphInstance& g, const WitnessParams& w, const ComponentKind& k, const VertexPair& A,
                    const VertexPair& B) {
  const double p = g.p();
  const bool disjoint = !A.intersects(B);
  switch (k.family) {
    case Family::K: {
      const int shared = (A.contains(B.head) ? 1 : 0) + (A.contains(B.tail) ? 1 : 0);
      if (shared != 1) return 0.0;
      const int a = B.contains(A.head) ? A.tail : A.head;
      const int b = A.contains(B.head) ? B.tail : B.head;
      return w.a(3) * g.g(a, b);
    }
    case Family::J:
    case Family::Jtilde: {
      if (k.family == Family::J && !disjoint) return 0.0;
      const unsigned mask = face_edges(k.eta, k.nu);
      double v = w.a(4) * std::pow(p, 4 - k.eta);
      if (mask & kHH) v *= g.g(A.head, B.head);
      if (mask & kHT) v *= g.g(A.head, B.tail);
      if (mask & kTH) v *= g.g(A.tail, B.head);
      if (mask & kTT) v *= g.g(A.tail, B.tail);
      return v;
    }
    case Family::L: break;
  }
  return 0.0;
}

double oracle_l(const GraphInstance& g, const WitnessParams& w, const ComponentKind& k, int a, const VertexPair& B) {
  if (B.contains(a)) return 0.0;
  if (k.eta == 2) return w.a(3) * g.g(a, B.head) * g.g(a, B.tail);
  return w.a(3) * g.p() * g.g(a, k.nu == 1 ? B.head : B.tail);
}

std::vector<ComponentKind> all_pair_kinds() {
  std::vector<ComponentKind> out{ComponentKind::k()};
  for (int eta = 1; eta <= 4; ++eta)
    for (int nu = 1; nu <= type_count(eta); ++nu) {
      out.push_back(ComponentKind::j(eta, nu));
      out.push_back(ComponentKind::jtilde(eta, nu));
    }
  return out;
}

}  // namespace

TEST_SUITE("decomposition") {
  TEST_CASE("face edge table") {
    CHECK(type_count(1) == 4);
    CHECK(type_count(2) == 6);
    CHECK(type_count(3) == 4);
    CHECK(type_count(4) == 1);
    for (int eta = 1; eta <= 4; ++eta) {
      std::set<unsigned> seen;
      for (int nu = 1; nu <= type_count(eta); ++nu) {
        const unsigned m = face_edges(eta, nu);
        CHECK(std::popcount(m) == eta);
        seen.insert(m);
      }
      CHECK(seen.size() == static_cast<std::size_t>(type_count(eta)));
    }
    CHECK(face_edges(1, 1) == kHH);
    CHECK(face_edges(1, 4) == kTT);
    CHECK(face_edges(4, 1) == (kHH | kHT | kTH | kTT));
    CHECK_THROWS(face_edges(2, 7));
    CHECK_THROWS(face_edges(5, 1));
    CHECK_THROWS(ComponentKind::l(2, 2).validate());
    CHECK_THROWS(ComponentKind::l(3, 1).validate());
  }

  TEST_CASE("component entries follow the definitions") {
    const auto g = sample_er(8, 0.4, 5);
    const auto w = derive_alphas(0.03, 0.4);
    SubsetIndexer ix(8);
    for (const auto& k : all_pair_kinds()) {
      const auto c = build_component(g, w, k);
      CHECK(c.prefactor == component_prefactor(k, w));
      REQUIRE(c.values.rows() == 28);
      for (std::size_t r = 0; r < 28; ++r)
        for (std::size_t s = 0; s < 28; ++s)
          CHECK(c.values(r, s) == doctest::Approx(oracle_entry(g, w, k, ix.pair_at(r), ix.pair_at(s))).epsilon(1e-14));
    }
    for (const auto& k : {ComponentKind::l(1, 1), ComponentKind::l(1, 2), ComponentKind::l(2, 1)}) {
      const auto c = build_component(g, w, k);
      REQUIRE(c.values.rows() == 8);
      for (int a = 1; a <= 8; ++a)
        for (std::size_t s = 0; s < 28; ++s)
          CHECK(c.values(a - 1, s) == doctest::Approx(oracle_l(g, w, k, a, ix.pair_at(s))).epsilon(1e-14));
    }
    CHECK_THROWS(build_component(g, derive_alphas(0.03, 0.5), ComponentKind::k()));
  }

  TEST_CASE("named entries") {
    const auto g = sample_er(9, 0.5, 2);
    const auto w = derive_alphas(0.02, 0.5);
    SubsetIndexer ix(9);
    const auto j41 = build_component(g, w, ComponentKind::j(4, 1)).values;
    CHECK(j41(ix.pair_rank(1, 2), ix.pair_rank(3, 4)) ==
          doctest::Approx(w.a(4) * g.g(1, 3) * g.g(1, 4) * g.g(2, 3) * g.g(2, 4)).epsilon(1e-14));
    const auto k = build_component(g, w, ComponentKind::k()).values;
    CHECK(k(ix.pair_rank(1, 2), ix.pair_rank(1, 5)) == doctest::Approx(w.a(3) * g.g(2, 5)).epsilon(1e-14));
    const auto full = GraphInstance::complete(9, 0.5);
    const auto j11 = build_component(full, w, ComponentKind::j(1, 1)).values;
    CHECK(j11(ix.pair_rank(1, 2), ix.pair_rank(3, 4)) == doctest::Approx(w.a(4) * 0.125 * 0.5).epsilon(1e-14));
    CHECK(j11(ix.pair_rank(1, 2), ix.pair_rank(2, 4)) == 0.0);
  }

  TEST_CASE("supports") {
    const auto g = sample_er(9, 0.5, 3);
    const auto w = derive_alphas(0.02, 0.5);
    SubsetIndexer ix(9);
    const auto k = build_component(g, w, ComponentKind::k()).values;
    const auto j = build_component(g, w, ComponentKind::j(3, 2)).values;
    const auto l21 = build_component(g, w, ComponentKind::l(2, 1)).values;
    for (std::size_t r = 0; r < 36; ++r)
      for (std::size_t s = 0; s < 36; ++s) {
        const auto A = ix.pair_at(r), B = ix.pair_at(s);
        const int shared = (A.contains(B.head) ? 1 : 0) + (A.contains(B.tail) ? 1 : 0);
        if (shared != 1) CHECK(k(r, s) == 0.0);
        if (shared != 0) CHECK(j(r, s) == 0.0);
      }
    for (int a = 1; a <= 9; ++a)
      for (std::size_t s = 0; s < 36; ++s)
        if (ix.pair_at(s).contains(a)) CHECK(l21(a - 1, s) == 0.0);
  }

  TEST_CASE("H22 expansion is exact") {
    for (auto [n, p] : {std::pair{15, 0.5}, std::pair{40, 0.1}, std::pair{12, 0.3}})
      for (std::uint64_t s = 0; s < 2; ++s) {
        const auto r = verify_expansion_H22(sample_er(n, p, s), derive_alphas(theorem_kappa(n), p));
        CHECK(r.ok());
      }
    const auto empty = sample_er(10, 1e-15, 1);
    CHECK(verify_expansion_H22(empty, derive_alphas(0.01, 1e-15)).residual <= 1e-12 * derive_alphas(0.01, 1e-15).a(4));
  }

  TEST_CASE("H12 expansion is exact") {
    for (int n : {10, 20, 40})
      for (std::uint64_t s = 0; s < 3; ++s) {
        const auto r = verify_expansion_H12(sample_er(n, 0.5, s), derive_alphas(theorem_kappa(n), 0.5));
        CHECK(r.intersecting_exact);
        CHECK(r.ok());
      }
    CHECK(verify_expansion_H12(GraphInstance::complete(12, 0.5), derive_alphas(0.01, 0.5)).ok());
    const auto g1 = sample_er(10, 1.0, 1);
    const auto w1 = derive_alphas(0.01, 1.0);
    for (const auto& k : {ComponentKind::l(1, 1), ComponentKind::l(1, 2), ComponentKind::l(2, 1)})
      CHECK(build_component(g1, w1, k).values.isZero(0.0));
    const auto blocks = extract_blocks(build_matrix(g1, w1, MatrixKind::H));
    CHECK((blocks.h12 - expected_block(Block::H12, 10, w1)).cwiseAbs().maxCoeff() <= 1e-18);
  }

  TEST_CASE("kernel identities") {
    for (std::uint64_t s = 0; s < 3; ++s) {
      const auto g = sample_er(25, 0.5, s);
      const auto w = derive_alphas(theorem_kappa(25), 0.5);
      const auto r = kernel_identities(g, w);
      CHECK(r.transpose_pairing);
      CHECK(r.ok());
    }
    const auto empty = sample_er(12, 1e-15, 2);
    CHECK(kernel_identities(empty, derive_alphas(0.01, 1e-15)).ok());
  }

  TEST_CASE("matrix-free operators match dense components") {
    const auto g = sample_er(9, 0.4, 6);
    const auto w = derive_alphas(0.04, 0.4);
    const Eigen::VectorXd v = random_vector(36, 1), u = random_vector(9, 2);
    for (const auto& k : all_pair_kinds()) {
      const auto dense = build_component(g, w, k).values;
      const auto op = component_operator(g, w, k);
      Eigen::VectorXd y, yt;
      op.apply(v, y);
      op.apply_transpose(v, yt);
      const double scale = dense.cwiseAbs().maxCoeff() * v.norm() * 36 + 1e-300;
      CHECK((y - dense * v).norm() <= 1e-13 * scale);
      CHECK((yt - dense.transpose() * v).norm() <= 1e-13 * scale);
    }
    for (const auto& k : {ComponentKind::l(1, 1), ComponentKind::l(1, 2), ComponentKind::l(2, 1)}) {
      const auto dense = build_component(g, w, k).values;
      const auto op = component_operator(g, w, k);
      Eigen::VectorXd y, yt;
      op.apply(v, y);
      op.apply_transpose(u, yt);
      CHECK((y - dense * v).norm() <= 1e-13 * dense.norm() * v.norm());
      CHECK((yt - dense.transpose() * u).norm() <= 1e-13 * dense.norm() * u.norm());
    }
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(36, 36);
    for (int nu = 1; nu <= 4; ++nu) sum += build_component(g, w, ComponentKind::jtilde(1, nu)).values;
    Eigen::VectorXd y;
    jtilde_class1_sum_operator(g, w).apply(v, y);
    CHECK((y - sum * v).norm() <= 1e-13 * sum.norm() * v.norm());
  }

  TEST_CASE("projected norms") {
    const int n = 12;
    const auto w = derive_alphas(0.03, 0.5);
    const auto e = expected_block(Block::H22, n, w);
    const auto s = eigenvalues_expected_H22(n, w);
    const double lam[3] = {s.lambda0, s.lambda1, s.lambda2};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const double v = projected_norm(a, e, b).value;
        if (a == b) CHECK(v == doctest::Approx(std::abs(lam[a])).epsilon(1e-8));
        else CHECK(v <= 1e-8 * std::abs(lam[0]) + 1e-8 * std::abs(lam[1]));
      }
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(66, 66);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const double v = projected_norm(a, id, b).value;
        if (a == b) CHECK(v == doctest::Approx(1.0).epsilon(1e-8));
        else CHECK(v <= 1e-8);
      }
    CHECK_THROWS(projected_norm(0, Eigen::MatrixXd::Identity(12, 12), 0));
  }
}
