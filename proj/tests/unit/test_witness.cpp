#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "sosw/models.hpp"
#include "sosw/spectral.hpp"
#include "sosw/subsets.hpp"
#include "sosw/witness.hpp"

using namespace sosw;

namespace {

// Entry oracles written straight from the definitions using std::set.
std::set<int> as_set(const Subset& s) {
  const auto e = s.elements();
  return {e.begin(), e.end()};
}

bool is_clique(const GraphInstance& g, const std::set<int>& s) {
  for (int a : s)
    for (int b : s)
      if (a < b && !g.edge(a, b)) return false;
  return true;
}

double oracle_m(const GraphInstance& g, const WitnessParams& w, const Subset& a, const Subset& b) {
  std::set<int> u = as_set(a);
  for (int x : as_set(b)) u.insert(x);
  return is_clique(g, u) ? w.a(static_cast<int>(u.size())) : 0.0;
}

double oracle_n(const GraphInstance& g, const WitnessParams& w, const Subset& a, const Subset& b) {
  const auto sa = as_set(a), sb = as_set(b);
  std::set<int> u = sa;
  for (int x : sb) u.insert(x);
  double prod = 1.0;
  for (int i : sa)
    if (!sb.count(i))
      for (int j : sb)
        if (!sa.count(j)) prod *= g.edge(i, j) ? 1.0 : 0.0;
  return w.a(static_cast<int>(u.size())) * prod;
}

double min_eig(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

}  // namespace

TEST_SUITE("witness") {
  TEST_CASE("derive_alphas closed forms") {
    const auto w = derive_alphas(0.01, 0.5);
    CHECK(w.a(0) == 1.0);
    CHECK(w.a(1) == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(w.a(2) == doctest::Approx(4e-4).epsilon(1e-14));
    CHECK(w.a(3) == doctest::Approx(8e-6).epsilon(1e-14));
    CHECK(w.a(4) == doctest::Approx(5.12e-6).epsilon(1e-14));

    const double k = 0.037;
    const auto one = derive_alphas(k, 1.0);
    CHECK(one.a(2) == doctest::Approx(2 * k * k).epsilon(1e-15));
    CHECK(one.a(3) == doctest::Approx(k * k * k).epsilon(1e-15));
    CHECK(one.a(4) == doctest::Approx(8 * k * k * k * k).epsilon(1e-15));

    // kappa = n^{-2/3} / log n at n = 100, evaluated independently.
    const double kappa = 1.0 / (std::cbrt(100.0 * 100.0) * std::log(100.0));
    CHECK(theorem_kappa(100) == doctest::Approx(kappa).epsilon(1e-14));
    CHECK(derive_alphas(theorem_kappa(100), 0.5).a(1) == doctest::Approx(0.0100791).epsilon(1e-5));

    CHECK_THROWS(derive_alphas(0.0, 0.5));
    CHECK_THROWS(derive_alphas(0.1, 0.0));
    CHECK_THROWS(derive_alphas(-0.1, 0.5));
  }

  TEST_CASE("entries match the definitions") {
    for (std::uint64_t s = 0; s < 3; ++s) {
      const auto g = sample_er(7, 0.5, s);
      const auto w = explicit_alphas(0.5, 0.11, 0.07, 0.05, 0.03);
      const auto m = build_matrix(g, w, MatrixKind::M);
      const auto nn = build_matrix(g, w, MatrixKind::N);
      const auto h = build_matrix(g, w, MatrixKind::H);
      SubsetIndexer ix(7);
      REQUIRE(m.size() == static_cast<Eigen::Index>(ix.dim()));
      REQUIRE(h.size() == static_cast<Eigen::Index>(ix.dim()) - 1);
      for (std::size_t r = 0; r < ix.dim(); ++r)
        for (std::size_t c = 0; c < ix.dim(); ++c) {
          const auto a = ix.set_of(r), b = ix.set_of(c);
          CHECK(m.values()(r, c) == oracle_m(g, w, a, b));
          CHECK(nn.values()(r, c) == oracle_n(g, w, a, b));
          if (r > 0 && c > 0)
            CHECK(h.values()(r - 1, c - 1) == oracle_n(g, w, a, b) - w.a(a.size) * w.a(b.size));
        }
    }
  }

  TEST_CASE("complete graph: M equals N") {
    const auto g = GraphInstance::complete(9, 0.5);
    const auto w = derive_alphas(0.05, 0.5);
    CHECK(build_matrix(g, w, MatrixKind::M).values() == build_matrix(g, w, MatrixKind::N).values());
  }

  TEST_CASE("empty graph") {
    const auto g = sample_er(8, 1e-15, 1);
    REQUIRE(g.edge_count() == 0);
    const auto w = derive_alphas(0.05, 0.5);
    const auto m = build_matrix(g, w, MatrixKind::M);
    SubsetIndexer ix(8);
    for (int i = 1; i <= 8; ++i)
      for (int j = 1; j <= 8; ++j) CHECK(m.at(Subset::single(i), Subset::single(j)) == (i == j ? w.a(1) : 0.0));
    for (std::size_t r = ix.first_pair_index(); r < ix.dim(); ++r) CHECK(m.values().row(r).isZero(0.0));
  }

  TEST_CASE("M = D N D exactly") {
    const auto g = sample_er(20, 0.5, 7);
    const auto w = derive_alphas(0.02, 0.5);
    const auto m = build_matrix(g, w, MatrixKind::M).values();
    const auto nn = build_matrix(g, w, MatrixKind::N).values();
    SubsetIndexer ix(20);
    Eigen::VectorXd d(ix.dim());
    for (std::size_t i = 0; i < ix.dim(); ++i) d(i) = is_clique(g, as_set(ix.set_of(i))) ? 1.0 : 0.0;
    const Eigen::MatrixXd dnd = d.asDiagonal() * nn * d.asDiagonal();
    CHECK((m - dnd).cwiseAbs().maxCoeff() == 0.0);
    CHECK(m == m.transpose());
  }

  TEST_CASE("H block entries") {
    const auto w = derive_alphas(0.03, 0.5);
    const auto g = sample_er(10, 0.5, 2);
    const auto b = extract_blocks(build_matrix(g, w, MatrixKind::H));
    CHECK(b.h11.rows() == 10);
    CHECK(b.h12.cols() == 45);
    CHECK(b.h22.rows() == 45);
    for (int i = 0; i < 45; ++i) CHECK(b.h22(i, i) == doctest::Approx(w.a(2) - w.a(2) * w.a(2)).epsilon(1e-15));
    for (int i = 0; i < 10; ++i) CHECK(b.h11(i, i) == doctest::Approx(w.a(1) - w.a(1) * w.a(1)).epsilon(1e-15));
    const auto full = extract_blocks(build_matrix(GraphInstance::complete(10, 0.5), w, MatrixKind::H));
    SubsetIndexer ix(10);
    CHECK(full.h22(ix.pair_rank(1, 2), ix.pair_rank(3, 4)) ==
          doctest::Approx(w.a(4) - w.a(2) * w.a(2)).epsilon(1e-15));
    CHECK_THROWS(extract_blocks(build_matrix(g, w, MatrixKind::M)));
  }

  TEST_CASE("feasibility report") {
    const int n = 30;
    const double kappa = 1e-3;
    const auto g = sample_er(n, 0.5, 4);
    const auto m = build_matrix(g, derive_alphas(kappa, 0.5), MatrixKind::M);
    const auto rep = check_sos_feasibility(m, g);
    CHECK(rep.unit_corner);
    CHECK(rep.entries_in_range);
    CHECK(rep.clique_support);
    CHECK(rep.union_symmetry);
    CHECK(rep.psd.verdict);
    CHECK(rep.feasible());
    CHECK(rep.objective == doctest::Approx(n * kappa).epsilon(1e-14));

    const auto bad = build_matrix(g, explicit_alphas(0.5, 0.5, 1.5, 0.1, 0.1), MatrixKind::M);
    CHECK_FALSE(check_sos_feasibility(bad, g).entries_in_range);

    // The witness is not supported on cliques of a different graph.
    CHECK_FALSE(check_sos_feasibility(m, sample_er(n, 0.5, 5)).clique_support);
  }

  TEST_CASE("H psd implies N psd implies M psd") {
    int h_pass = 0;
    for (double kappa : {1e-3, 5e-3, 1e-2, 3e-2, 8e-2})
      for (std::uint64_t s = 0; s < 3; ++s) {
        const auto g = sample_er(14, 0.5, s);
        const auto w = derive_alphas(kappa, 0.5);
        const double h = min_eig(build_matrix(g, w, MatrixKind::H).values());
        const double nn = min_eig(build_matrix(g, w, MatrixKind::N).values());
        const double m = min_eig(build_matrix(g, w, MatrixKind::M).values());
        if (h >= 0.0) {
          ++h_pass;
          CHECK(nn >= -1e-14);
          CHECK(m >= -1e-14);
        }
        if (nn >= 0.0) CHECK(m >= -1e-14);
      }
    CHECK(h_pass > 0);
  }

  TEST_CASE("clique-restricted witness gives the same PSD verdict") {
    for (double kappa : {1e-3, 2e-2, 0.2})
      for (std::uint64_t s = 0; s < 2; ++s) {
        const auto g = sample_er(20, 0.5, s);
        const auto w = derive_alphas(kappa, 0.5);
        const auto full = build_matrix(g, w, MatrixKind::M).values();
        const auto restricted = build_clique_restricted_M(g, w);
        const double tol = 1e-12;
        CHECK((min_eig(full) >= -tol) == (min_eig(restricted.values) >= -tol));
      }
  }

  TEST_CASE("scaling keeps the corner and shrinks everything else") {
    const auto g = sample_er(12, 0.5, 3);
    const auto m = build_matrix(g, derive_alphas(0.01, 0.5), MatrixKind::M);
    const auto s = scale_witness(m, 0.25);
    CHECK(s.values()(0, 0) == 1.0);
    for (Eigen::Index r = 0; r < m.size(); ++r)
      for (Eigen::Index c = 0; c < m.size(); ++c)
        if (r || c) CHECK(s.values()(r, c) == 0.25 * m.values()(r, c));
    CHECK(check_sos_feasibility(s, g).feasible());
    CHECK_THROWS(scale_witness(m, 1.5));
  }

  TEST_CASE("matrix dump round trip") {
    const auto g = sample_er(9, 0.5, 8);
    const auto m = build_matrix(g, derive_alphas(0.07, 0.5), MatrixKind::H);
    for (auto fmt : {DumpFormat::Text, DumpFormat::Binary}) {
      std::stringstream ss;
      write_matrix(ss, m, fmt);
      CHECK(read_matrix(ss, fmt) == m.values());
    }
    std::stringstream ss;
    write_matrix(ss, m, DumpFormat::Text);
    std::string n, dim, kind;
    ss >> n >> dim >> kind;
    CHECK(n == "9");
    CHECK(dim == std::to_string(m.size()));
    CHECK(kind == "H");
  }
}
