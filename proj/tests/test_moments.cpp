#include <doctest.h>

#include <cmath>
#include <numeric>

#include "sbm/errors.hpp"
#include "sbm/graph.hpp"
#include "sbm/moments.hpp"
#include "sbm/stats.hpp"

using namespace sbm;

namespace {

SimpleGraph cycle_graph(std::size_t k) {
  std::vector<Edge> e;
  for (VertexId i = 0; i + 1 < k; ++i) e.push_back({i, i + 1});
  e.push_back({0, static_cast<VertexId>(k - 1)});
  return SimpleGraph(k, e);
}

// Y by the definition: every labeling, every pair, plain products.
double naive_Y(const SimpleGraph& g, double a, double b) {
  const std::size_t n = g.num_vertices();
  long double total = 0;
  for (std::uint32_t s = 0; s < (1u << n); ++s) {
    long double prod = 1;
    for (VertexId u = 0; u < n; ++u)
      for (VertexId v = u + 1; v < n; ++v)
        prod *= edge_weight(g.has_edge(u, v), ((s >> u) & 1u) == ((s >> v) & 1u), a, b, n);
    total += prod;
  }
  return static_cast<double>(total / (1u << n));
}

}  // namespace

TEST_CASE("edge weight table") {
  CHECK(edge_weight(true, true, 3, 1, 100) == 1.5);
  CHECK(edge_weight(true, false, 3, 1, 100) == 0.5);
  CHECK(edge_weight(false, true, 3, 1, 100) == doctest::Approx(97.0 / 98.0));
  CHECK(edge_weight(false, false, 3, 1, 100) == doctest::Approx(99.0 / 98.0));
  for (bool present : {true, false})
    for (bool same : {true, false}) CHECK(edge_weight(present, same, 2, 2, 50) == 1.0);
  CHECK_THROWS(edge_weight(true, true, 3, 1, 1));
}

TEST_CASE("expected edge weight is one") {
  RngStream rng(1, 0);
  for (int i = 0; i < 100; ++i) {
    const double b = 0.1 + 4 * rng.uniform();
    const double a = b + 6 * rng.uniform();
    const std::size_t n = 10 + rng.uniform_int(10000);
    CHECK(std::abs(expected_edge_weight(true, a, b, n) - 1.0) <= 4e-16);
    CHECK(std::abs(expected_edge_weight(false, a, b, n) - 1.0) <= 4e-16);
  }
}

TEST_CASE("exact Y") {
  CHECK(exact_Y(SimpleGraph(1, {}), 3, 1) == 1.0);
  RngStream rng(2, 0);
  for (int i = 0; i < 10; ++i) {
    auto g = sample_er(9, 2.0, rng);
    CHECK(exact_Y(g.graph(), 2, 2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(exact_Y(g.graph(), 3, 1) == doctest::Approx(naive_Y(g.graph(), 3, 1)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(exact_Y(SimpleGraph(25, {}), 3, 1), BudgetExceeded);
}

TEST_CASE("Y is invariant under vertex relabeling") {
  RngStream rng(3, 0);
  auto g = sample_er(12, 2.0, rng).graph();
  std::vector<VertexId> perm(12);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(i + 1)]);
  CHECK(exact_Y(g.permuted(perm), 3, 1) == doctest::Approx(exact_Y(g, 3, 1)).epsilon(1e-13));
}

TEST_CASE("mean of Y is one under the null") {
  RngStream root(4, 0);
  std::vector<double> ys;
  for (std::uint64_t i = 0; i < 5000; ++i) {
    auto rng = root.split(i);
    ys.push_back(exact_Y(sample_er(12, 2.0, rng).graph(), 3, 1));
  }
  const auto s = summarize(ys);
  CHECK(std::abs(s.mean - 1.0) <= 3 * s.stderr_mean);
}

TEST_CASE("second moment limit") {
  CHECK(second_moment_limit(0.0) == 1.0);
  CHECK(second_moment_limit(0.5) == doctest::Approx(std::exp(-0.3125) / std::sqrt(0.5)));
  CHECK(second_moment_limit(0.5) == doctest::Approx(1.03466).epsilon(1e-5));
  double prev = 1.0;
  for (double t = 0.5; t < 0.9999; t += 0.01) {
    CHECK(second_moment_limit(t) > prev);
    prev = second_moment_limit(t);
  }
  CHECK_THROWS(second_moment_limit(1.0));
}

TEST_CASE("cross moments") {
  const double direct = cross_moment(PairAgreement::agree, 3, 1, 100);
  CHECK(std::abs(direct - cross_moment_expansion(PairAgreement::agree, 3, 1, 100)) < 1e-5);
  CHECK(direct == doctest::Approx(1.0051).epsilon(1e-5));
  CHECK(cross_moment(PairAgreement::agree, 2, 2, 100) == 1.0);
  CHECK(cross_moment(PairAgreement::disagree, 2, 2, 100) == 1.0);
  for (double a : {3.0, 5.0, 8.0}) {
    const double b = 1.0;
    double prev_ratio = 0;
    for (std::size_t n : {100, 1000, 10000}) {
      const double nd = static_cast<double>(n);
      const double diff_agree =
          std::abs(cross_moment(PairAgreement::agree, a, b, n) - cross_moment_expansion(PairAgreement::agree, a, b, n));
      const double diff_dis = std::abs(cross_moment(PairAgreement::disagree, a, b, n) -
                                       cross_moment_expansion(PairAgreement::disagree, a, b, n));
      const double ratio = std::max(diff_agree, diff_dis) * nd * nd * nd;
      CHECK(ratio < 1000.0);
      if (prev_ratio > 0) CHECK(ratio < 2 * prev_ratio);
      prev_ratio = ratio;
    }
    const double t = (a - b) * (a - b) / (2 * (a + b));
    const double gap = cross_moment(PairAgreement::agree, a, b, 1000) - cross_moment(PairAgreement::disagree, a, b, 1000);
    CHECK(gap == doctest::Approx(2 * (t / 1000 + (a - b) * (a - b) / 4e6)).epsilon(1e-3));
  }
  // only the sign of sigma_u sigma_v tau_u tau_v matters
  CHECK(cross_moment(false, false, 3, 1, 50) == doctest::Approx(cross_moment(true, true, 3, 1, 50)).epsilon(1e-14));
  CHECK(cross_moment(false, true, 3, 1, 50) == doctest::Approx(cross_moment(true, false, 3, 1, 50)).epsilon(1e-14));
}

TEST_CASE("binomial mgf") {
  CHECK(mgf_binomial(2, 0.5) == doctest::Approx(0.5 + 0.5 * std::exp(0.5)).epsilon(1e-14));
  CHECK(mgf_binomial(2, 0.5) == doctest::Approx(1.32436).epsilon(1e-5));
  for (std::size_t n : {1, 7, 100, 5000}) CHECK(mgf_binomial(n, 0.0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::abs(mgf_binomial(1000, 0.5) / std::sqrt(2.0) - 1.0) < 0.02);
  for (double s : {0.25, 0.5, 0.75}) {
    const double limit = 1.0 / std::sqrt(1.0 - s);
    CHECK(std::abs(mgf_binomial(10000, s) - limit) < std::abs(mgf_binomial(100, s) - limit));
  }
  CHECK_THROWS(mgf_binomial(10, 1.0));
}

TEST_CASE("cycle weight sums") {
  CHECK(cycle_weight_sum(cycle_graph(3), 3, 1) == 9.0);
  std::vector<Edge> two{{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {5, 6}, {3, 6}};
  CHECK(cycle_weight_sum(SimpleGraph(7, two), 3, 1) == 153.0);
  RngStream rng(5, 0);
  for (int i = 0; i < 100; ++i) {
    const double b = 0.1 + 4 * rng.uniform();
    const double a = b + 6 * rng.uniform();
    const int k = 3 + static_cast<int>(rng.uniform_int(8));
    const double expected = std::pow(2.0, k) * (1 + cycle_delta(a, b, k));
    CHECK(cycle_weight_sum(cycle_graph(k), a, b) == doctest::Approx(expected).epsilon(1e-12));
  }
  for (int i = 0; i < 30; ++i) {
    auto h = sample_er(10, 4.0, rng).graph();
    const double bound = std::pow(2.0, static_cast<double>(h.num_vertices() + h.num_edges()));
    CHECK(cycle_weight_sum(h, 7, 0.5) <= bound);
  }
}

TEST_CASE("subgraph series") {
  CHECK(std::abs(subgraph_series_partial(0.5, 200) - subgraph_series_closed_form(0.5)) < 1e-8);
  for (int k = 3; k <= 10; ++k)
    CHECK(cycle_lambda(5, 1, k) * cycle_delta(5, 1, k) * cycle_delta(5, 1, k) ==
          doctest::Approx(std::pow(4.0 / 3.0, k) / (2 * k)).epsilon(1e-12));
}

TEST_CASE("exact second moment approaches its limit") {
  CHECK(exact_second_moment(2, 2, 20) == doctest::Approx(1.0).epsilon(1e-12));
  const double limit = second_moment_limit(0.5);
  const double e50 = exact_second_moment(3, 1, 50), e200 = exact_second_moment(3, 1, 200);
  CHECK(std::abs(e200 - limit) < std::abs(e50 - limit));
  CHECK(std::abs(e200 - limit) < 0.02);
}

TEST_CASE("exact second moment matches enumeration at tiny n") {
  // E[Y^2] = sum over graphs of P'(G) Y(G)^2, all 2^6 graphs on 4 vertices
  const std::size_t n = 4;
  const double a = 3, b = 1, p = (a + b) / (2.0 * n);
  std::vector<Edge> all;
  for (VertexId u = 0; u < n; ++u)
    for (VertexId v = u + 1; v < n; ++v) all.push_back({u, v});
  double total = 0;
  for (std::uint32_t mask = 0; mask < 64; ++mask) {
    std::vector<Edge> e;
    for (std::size_t i = 0; i < 6; ++i)
      if (mask >> i & 1u) e.push_back(all[i]);
    const double y = exact_Y(SimpleGraph(n, e), a, b);
    total += std::pow(p, e.size()) * std::pow(1 - p, 6 - e.size()) * y * y;
  }
  CHECK(exact_second_moment(a, b, n) == doctest::Approx(total).epsilon(1e-12));
}

TEST_CASE("overlap") {
  const Label s[] = {1, 1, -1, -1};
  const Label t[] = {1, -1, -1, -1};
  CHECK(overlap(s, t) == 0.5);
  CHECK(overlap(s, s) == 1.0);
}

TEST_CASE("conditioned moments with a = b reduce to the cycle mean") {
  auto r = conditioned_moment_check(2, 2, 10, 3, 200, RngStream(6, 0), 1);
  CHECK(r.mean_y == doctest::Approx(1.0));
  CHECK(r.mean_yx == doctest::Approx(r.mean_x));
  CHECK(r.delta_k == 0.0);
}
