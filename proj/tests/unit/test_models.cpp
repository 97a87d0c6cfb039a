#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "sosw/models.hpp"

using namespace sosw;

TEST_SUITE("models") {
  TEST_CASE("p = 1 gives the complete graph") {
    const auto g = sample_er(12, 1.0, 99);
    CHECK(g.edge_count() == 66);
    for (int i = 1; i <= 12; ++i)
      for (int j = 1; j <= 12; ++j) CHECK(g.g(i, j) == 0.0);
  }

  TEST_CASE("centering with no edges drawn") {
    const double eps = 1e-12;
    const auto g = sample_er(10, eps, 3);
    REQUIRE(g.edge_count() == 0);
    for (int i = 1; i <= 10; ++i)
      for (int j = 1; j <= 10; ++j) CHECK(g.g(i, j) == (i == j ? 0.0 : -eps));
  }

  TEST_CASE("edge count of G(50, 1/2) is within 4 sigma") {
    const double mean = 1225 * 0.5, sigma = std::sqrt(1225 * 0.25);
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto g = sample_er(50, 0.5, s);
      CHECK(std::abs(static_cast<double>(g.edge_count()) - mean) <= 4 * sigma);
    }
  }

  TEST_CASE("sampler errors") {
    CHECK_THROWS(sample_er(10, 0.0, 1));
    CHECK_THROWS(sample_er(10, 1.5, 1));
    CHECK_THROWS(sample_er(3, 0.5, 1));
    CHECK_THROWS(sample_planted(10, 0.5, 11, 1));
    CHECK_THROWS(sample_gaussian(10, 1.0, std::nullopt, Hypothesis::H1, 1));
  }

  TEST_CASE("planted instances") {
    const auto full = sample_planted(10, 0.5, 10, 4);
    CHECK(full.edge_count() == 45);
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto g = sample_planted(40, 0.3, 7, s);
      REQUIRE(g.planted().has_value());
      CHECK(g.planted()->size() == 7);
      CHECK(clique_indicator(g, *g.planted()) == 1);
    }
  }

  TEST_CASE("planted set is uniform") {
    std::vector<int> hits(101, 0);
    for (std::uint64_t s = 0; s < 1000; ++s)
      for (int v : sample_subset(100, 10, s)) ++hits[static_cast<std::size_t>(v)];
    for (int v = 1; v <= 100; ++v) CHECK(std::abs(hits[static_cast<std::size_t>(v)] / 1000.0 - 0.1) <= 0.03);
  }

  TEST_CASE("gaussian with mu = 0 under H1 equals H0") {
    const auto a = sample_gaussian(30, 0.0, 5, Hypothesis::H1, 11);
    const auto b = sample_gaussian(30, 0.0, std::nullopt, Hypothesis::H0, 11);
    CHECK(a.A == b.A);
  }

  TEST_CASE("gaussian moments") {
    const auto h0 = sample_gaussian(200, 0.0, std::nullopt, Hypothesis::H0, 5);
    double sum = 0.0;
    for (int i = 0; i < 200; ++i)
      for (int j = i + 1; j < 200; ++j) sum += h0.A(i, j);
    CHECK(std::abs(sum / 19900.0) <= 4.0 / std::sqrt(19900.0));

    const auto h1 = sample_gaussian(200, 1.0, 20, Hypothesis::H1, 5);
    REQUIRE(h1.planted.has_value());
    const auto& q = *h1.planted;
    double qs = 0.0;
    for (std::size_t a = 0; a < q.size(); ++a)
      for (std::size_t b = a + 1; b < q.size(); ++b) qs += h1.A(q[a] - 1, q[b] - 1);
    CHECK(std::abs(qs / 190.0 - 1.0) <= 4.0 / std::sqrt(190.0));
    for (int i = 0; i < 200; ++i) {
      CHECK(h1.A(i, i) == 0.0);
      for (int j = 0; j < 200; ++j) CHECK(h1.A(i, j) == h1.A(j, i));
    }
  }

  TEST_CASE("clique indicator") {
    const auto g = sample_er(8, 0.5, 2);
    const std::vector<int> one{3};
    CHECK(clique_indicator(g, one) == 1);
    const auto empty = sample_er(8, 1e-15, 2);
    REQUIRE(empty.edge_count() == 0);
    const std::vector<int> two{2, 5};
    CHECK(clique_indicator(empty, two) == 0);
    const auto planted = sample_planted(20, 0.2, 6, 8);
    const std::vector<int> sub(planted.planted()->begin(), planted.planted()->begin() + 4);
    CHECK(clique_indicator(planted, sub) == 1);
  }

  TEST_CASE("determinism and symmetry") {
    CHECK(sample_er(40, 0.3, 17) == sample_er(40, 0.3, 17));
    CHECK_FALSE(sample_er(40, 0.3, 17) == sample_er(40, 0.3, 18));
    CHECK(sample_planted(40, 0.3, 5, 17) == sample_planted(40, 0.3, 5, 17));
    CHECK(sample_gaussian(20, 1.0, 4, Hypothesis::H1, 9).A == sample_gaussian(20, 1.0, 4, Hypothesis::H1, 9).A);
    const auto g = sample_er(25, 0.4, 1);
    const Eigen::MatrixXd adj = g.adjacency_matrix();
    CHECK(adj == adj.transpose());
    for (int i = 1; i <= 25; ++i)
      for (int j = 1; j <= 25; ++j) {
        CHECK(g.edge(i, j) == g.edge(j, i));
        if (i != j) CHECK(g.g(i, j) == adj(i - 1, j - 1) - 0.4);
      }
  }

  TEST_CASE("threshold graph edge law") {
    const double lambda = 1.0, p = normal_cdf(-lambda);
    std::size_t edges = 0, pairs = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto a = sample_gaussian(60, 0.0, std::nullopt, Hypothesis::H0, s);
      const auto g = threshold_graph(a, lambda);
      CHECK(g.p() == p);
      edges += g.edge_count();
      pairs += 1770;
    }
    const double sigma = std::sqrt(pairs * p * (1 - p));
    CHECK(std::abs(static_cast<double>(edges) - pairs * p) <= 4 * sigma);
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(normal_cdf(-1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-14));
  }

  TEST_CASE("instance dump round trip") {
    const auto g = sample_er(15, 0.35, 21);
    std::stringstream ss;
    write_instance(ss, g);
    const auto back = read_instance(ss);
    CHECK(back == g);
    CHECK(back.p() == g.p());
    CHECK(back.seed() == g.seed());
  }
}
