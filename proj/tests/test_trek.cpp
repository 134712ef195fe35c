#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "svarid/error.hpp"
#include "svarid/trek.hpp"

using namespace svarid;
using svarid::testing::V;
using svarid::testing::stable_draw;

TEST_SUITE("trek") {

TEST_CASE("treks of the one-confounder example") {
  const auto g = worked_example(ExampleName::Ex3_6).graph;
  // U_{t-1} -> Y_t directly, and U_{t-2} -> U_{t-1} -> Y_t with left side
  // U_{t-1} <- U_{t-2}
  const auto ts = enumerate_treks(g, V(0, -1), V(1, 0), 1);
  CHECK(ts.size() == 2);
  for (const auto& t : ts) {
    CHECK(t.left.front() == V(0, -1));
    CHECK(t.right.back() == V(1, 0));
    CHECK(t.left.back() == t.right.front());
  }
}

TEST_CASE("enumeration and path sums agree") {
  for (auto e : {ExampleName::Ex3_6, ExampleName::F1, ExampleName::F2}) {
    const auto g = worked_example(e).graph;
    auto p = stable_draw(g, 21);
    for (int i = 0; i < p.dim(); ++i) p.noise_var(i) = 1.0 + 0.5 * i;
    const std::vector<std::pair<Vertex, Vertex>> pairs{
        {V(1, 0), V(1, 0)}, {V(1, 0), V(g.dim() - 1, -2)}, {V(0, -1), V(1, 3)}};
    for (const auto& [a, b] : pairs) {
      const auto ts = enumerate_treks(g, a, b, 6);
      double sum = 0.0;
      for (const auto& t : ts) sum += trek_monomial(p, t);
      CHECK(sum == doctest::Approx(trek_sum_truncated(p, a, b, 6)).epsilon(1e-10));
    }
  }
}

TEST_CASE("enumeration cap") {
  const auto g = worked_example(ExampleName::F2).graph;
  CHECK_THROWS_AS(enumerate_treks(g, V(1, 0), V(2, 0), 40, 100), SpecError);
}

TEST_CASE("scalar AR(1) truncated trek sum has a geometric tail") {
  for (double a : {0.3, 0.6, 0.9})
    for (int D : {5, 10, 20}) {
      const auto p = svarid::testing::scalar_ar1(a, 1.7);
      const double full = 1.7 / (1 - a * a);
      const double tail = 1.7 * std::pow(a, 2 * (D + 1)) / (1 - a * a);
      const double s = trek_sum_truncated(p, V(0, 0), V(0, 0), D);
      CHECK(std::abs(full - s) <= tail + 1e-13 * full);
      CHECK(std::abs(full - s) >= tail - 1e-13 * full);
    }
}

TEST_CASE("deep trek sums converge to the exact covariance") {
  const auto g = worked_example(ExampleName::Ex3_6).graph;
  const auto p = stable_draw(g, 31);
  const auto exact = exact_autocov(p, 6);
  for (const auto& [a, b] : std::vector<std::pair<Vertex, Vertex>>{
           {V(1, 0), V(1, 0)}, {V(1, 0), V(1, -3)}, {V(0, 0), V(1, 2)}})
    CHECK(trek_sum_truncated(p, a, b, 200) == doctest::Approx(exact.cov(a, b)).epsilon(1e-9));
}

TEST_CASE("parent decomposition") {
  const auto ex = worked_example(ExampleName::F1);
  const auto p = stable_draw(ex.graph, 41);
  const auto cov = exact_autocov(p, 12);
  // R vertices are not descendants of y
  for (const auto& r : ex.spec.R)
    CHECK(parent_decomposition_residual(p, r, ex.spec.y, cov) < 1e-10);
  // superset parents carry zero coefficients
  CHECK(parent_decomposition_residual(p, V(2, -5), ex.spec.y, cov, {V(2, -1), V(1, -4)}) < 1e-10);
  // Y_{t+1} descends from Y_t
  CHECK_THROWS_AS(parent_decomposition_residual(p, V(1, 1), V(1, 0), cov), SpecError);
}

}
