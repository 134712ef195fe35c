#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "svarid/autocov.hpp"
#include "svarid/error.hpp"
#include "svarid/svar.hpp"

using namespace svarid;
using svarid::testing::scalar_ar1;
using svarid::testing::stable_draw;

namespace {

// Γ(h) = Σ_i Ψ_{i+h} Σ Ψ_i^T from the moving-average weights.
std::vector<Eigen::MatrixXd> ma_autocov(const SvarParams& p, int h_max, int terms) {
  const auto cf = companion(p);
  const int d = p.dim();
  std::vector<Eigen::MatrixXd> psi{cf.B0};
  for (int i = 1; i < terms + h_max; ++i) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    for (int k = 1; k <= p.order() && k <= i; ++k)
      m += cf.reduced[static_cast<std::size_t>(k - 1)] * psi[static_cast<std::size_t>(i - k)];
    psi.push_back(m);
  }
  const Eigen::MatrixXd S = p.noise_var.asDiagonal();
  std::vector<Eigen::MatrixXd> out;
  for (int h = 0; h <= h_max; ++h) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < terms; ++i)
      g += psi[static_cast<std::size_t>(i + h)] * S * psi[static_cast<std::size_t>(i)].transpose();
    out.push_back(g);
  }
  return out;
}

}  // namespace

TEST_SUITE("svar") {

TEST_CASE("parameter support") {
  const auto ex = worked_example(ExampleName::F1);
  auto p = SvarParams::zeros(ex.graph);
  CHECK(p.coeffs.size() == 6);
  p.set(5, SeriesId{1}, SeriesId{2}, 0.4);
  CHECK(p.coef(5, SeriesId{1}, SeriesId{2}) == 0.4);
  CHECK(p.coef(9, SeriesId{1}, SeriesId{2}) == 0.0);
  CHECK_THROWS_AS(p.set(4, SeriesId{1}, SeriesId{2}, 0.4), SpecError);
  p.coeffs[4](1, 2) = 0.3;
  CHECK_THROWS_AS(p.validate(), SpecError);
  p.coeffs[4](1, 2) = 0.0;
  p.noise_var(0) = -1.0;
  CHECK_THROWS_AS(p.validate(), SpecError);
}

TEST_CASE("stability margins") {
  // S1_t = phi S1_{t-1} + S2_{t-1} + e1_t, S2_t = e2_t with phi = 2
  LagStructure g(0, 2);
  g.add_edge(SeriesId{0}, SeriesId{0}, 1);
  g.add_edge(SeriesId{0}, SeriesId{1}, 1);
  auto p = SvarParams::zeros(g);
  p.set(1, SeriesId{0}, SeriesId{0}, 2.0);
  p.set(1, SeriesId{0}, SeriesId{1}, 1.0);
  CHECK(spectral_margin(p) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(exact_autocov(p, 2), NumericalError);
  CHECK_THROWS_AS(simulate(p, 10, 10, 1), NumericalError);

  CHECK(spectral_margin(SvarParams::zeros(g)) == 0.0);
  CHECK(spectral_margin(scalar_ar1(0.5)) == 0.5);
  CHECK(spectral_margin(scalar_ar1(-0.7)) == doctest::Approx(0.7));
}

TEST_CASE("scalar AR(1) autocovariance is closed form") {
  for (double a : {0.3, -0.6, 0.9}) {
    const auto t = exact_autocov(scalar_ar1(a, 2.0), 6);
    for (int h = 0; h <= 6; ++h)
      CHECK(t.at(h)(0, 0) == doctest::Approx(2.0 * std::pow(a, h) / (1 - a * a)).epsilon(1e-12));
    CHECK(t.at(-3)(0, 0) == t.at(3)(0, 0));
  }
}

TEST_CASE("exact autocovariance matches the moving-average sum") {
  for (auto e : {ExampleName::Ex3_6, ExampleName::F1, ExampleName::F2, ExampleName::F3}) {
    const auto g = worked_example(e).graph;
    for (std::uint64_t s = 0; s < 5; ++s) {
      auto p = stable_draw(g, 100 + s);
      for (int i = 0; i < p.dim(); ++i) p.noise_var(i) = 0.5 + 0.25 * i;
      const auto t = exact_autocov(p, 8);
      const auto ma = ma_autocov(p, 8, 1500);
      for (int h = 0; h <= 8; ++h)
        CHECK((t.at(h) - ma[static_cast<std::size_t>(h)]).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("direct and doubling Lyapunov solvers agree") {
  const auto g = worked_example(ExampleName::F3).graph;
  const auto p = stable_draw(g, 7);
  LyapunovOptions direct, doubling;
  doubling.direct_max_dim = 0;
  const auto a = exact_autocov(p, 12, direct);
  const auto b = exact_autocov(p, 12, doubling);
  for (int h = 0; h <= 12; ++h) CHECK((a.at(h) - b.at(h)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("instantaneous-only process") {
  LagStructure g(0, 2);
  g.add_edge(SeriesId{1}, SeriesId{0}, 0);
  auto p = SvarParams::zeros(g);
  p.set(0, SeriesId{1}, SeriesId{0}, 0.5);
  const auto t = exact_autocov(p, 3);
  CHECK(t.at(0)(1, 1) == doctest::Approx(1.25));
  CHECK(t.at(0)(0, 1) == doctest::Approx(0.5));
  CHECK(t.at(2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("vertex covariance convention") {
  const auto p = stable_draw(worked_example(ExampleName::F1).graph, 3);
  const auto t = exact_autocov(p, 4);
  const Vertex a{SeriesId{1}, 5}, b{SeriesId{2}, 2};
  CHECK(t.cov(a, b) == t.at(3)(1, 2));
  CHECK(t.cov(b, a) == t.cov(a, b));
  CHECK(t.cov(a.shifted(-9), b.shifted(-9)) == t.cov(a, b));
  CHECK_THROWS_AS(t.cov(a, b.shifted(-5)), SpecError);
}

TEST_CASE("simulation is seed-determined") {
  const auto p = stable_draw(worked_example(ExampleName::F2).graph, 11);
  const auto a = simulate(p, 200, 50, 42);
  const auto b = simulate(p, 200, 50, 42);
  const auto c = simulate(p, 200, 50, 43);
  CHECK(a.rows() == 3);
  CHECK(a.cols() == 200);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("simulated moments approach the exact ones") {
  const auto p = stable_draw(worked_example(ExampleName::Ex3_6).graph, 5);
  const auto exact = exact_autocov(p, 3);
  const auto data = simulate(p, 400000, 1000, 9);
  for (int h = 0; h <= 3; ++h) {
    const auto err = (sample_autocov(data, h, false) - exact.at(h)).cwiseAbs().maxCoeff();
    CHECK(err < 0.05 * exact.at(0).cwiseAbs().maxCoeff());
  }
}

TEST_CASE("custom noise sampler keeps second moments") {
  const auto p = scalar_ar1(0.5);
  NoiseSampler uniform = [](std::mt19937_64& rng) {
    return std::uniform_real_distribution<double>(-std::sqrt(3.0), std::sqrt(3.0))(rng);
  };
  const auto data = simulate(p, 300000, 100, 1, uniform);
  CHECK(sample_autocov(data, 0, false)(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(0.02));
  CHECK(data.cwiseAbs().maxCoeff() < 2 * std::sqrt(3.0) / 0.5);
}

TEST_CASE("scaled covariance table") {
  const auto t = exact_autocov(scalar_ar1(0.5), 2).scaled(3.0);
  CHECK(t.at(1)(0, 0) == doctest::Approx(3.0 * 0.5 / 0.75));
}

}
