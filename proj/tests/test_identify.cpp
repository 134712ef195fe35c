#include <doctest.h>

#include "helpers.hpp"
#include "svarid/error.hpp"
#include "svarid/estimate.hpp"
#include "svarid/identify.hpp"

using namespace svarid;
using svarid::testing::V;
using svarid::testing::stable_draw;

namespace {

const std::vector<ExampleName> kExamples{ExampleName::Ex3_6, ExampleName::F1, ExampleName::F2,
                                         ExampleName::F3};

VertexSet as_set(const std::vector<Vertex>& v) { return {v.begin(), v.end()}; }

double worst_population_error(const LagStructure& g, const EstimatorSpec& spec, int draws,
                              std::uint64_t seed) {
  double worst = 0.0;
  for (int k = 0; k < draws; ++k) {
    const auto p = stable_draw(g, seed + static_cast<std::uint64_t>(k));
    TableProvider prov(exact_autocov(p, static_cast<int>(spec.max_lag_span())));
    const auto est = solve_effects(build_system(prov, spec));
    for (std::size_t i = 0; i < est.columns.size(); ++i) {
      const auto& c = est.columns[i];
      worst = std::max(worst, std::abs(est.coefficients[i] - p.coef(c.lag, c.target, c.source)));
    }
  }
  return worst;
}

}  // namespace

TEST_SUITE("identify") {

TEST_CASE("C sets of the worked examples") {
  for (auto e : kExamples) {
    const auto ex = worked_example(e);
    const auto C = build_c(ex.graph, ex.spec.y, ex.certificate.F_obs);
    CHECK(as_set(C) == as_set(ex.spec.C));
  }
  // order: observed parents of y, then F, then the remaining parents of F
  const auto ex = worked_example(ExampleName::Ex3_6);
  CHECK(build_c(ex.graph, ex.spec.y, ex.certificate.F_obs) == ex.spec.C);
  const auto f1 = worked_example(ExampleName::F1);
  CHECK(build_c(f1.graph, f1.spec.y, f1.certificate.F_obs) == f1.spec.C);
}

TEST_CASE("coefficient columns") {
  const auto ex = worked_example(ExampleName::F2);
  const auto& m = ex.spec.coeff_map;
  REQUIRE(m.size() == 3);
  CHECK(ex.spec.C[static_cast<std::size_t>(m[0].column)] == V(2, -3));
  for (const auto& c : m) {
    CHECK(c.target == SeriesId{1});
    CHECK_FALSE(c.superset);
    CHECK(ex.spec.y.time - ex.spec.C[static_cast<std::size_t>(c.column)].time == c.lag);
  }
  // declared extra parents become superset columns
  const auto extra = make_coeff_map(ex.graph, ex.spec.y, ex.spec.C, {V(2, 0)});
  CHECK(extra.size() == 4);
  CHECK(extra.back().superset);
  CHECK(extra.back().lag == 0);
  CHECK_THROWS_AS(make_coeff_map(ex.graph, ex.spec.y, ex.spec.C, {V(1, 1)}), SpecError);
}

TEST_CASE("the worked examples pass every identification check") {
  for (auto e : kExamples) {
    const auto ex = worked_example(e);
    const auto checks = check_identification_conditions(ex.graph, ex.spec.y, ex.certificate.B_U,
                                                        ex.certificate.F_obs, ex.spec.R, ex.spec.C);
    for (const auto& c : checks) {
      INFO(ex.name << " " << c.name << " " << c.witness);
      CHECK(c.pass);
    }
    for (const char* n : {"1", "2a", "2b", "2c", "3", "4", "|R|=|C|"}) CHECK(find_check(checks, n));
  }
}

TEST_CASE("condition failures are reported") {
  const auto ex = worked_example(ExampleName::Ex3_6);
  const auto& c = ex.certificate;
  auto R = ex.spec.R;
  R[2] = V(1, 1);  // descendant of U_t
  auto checks = check_identification_conditions(ex.graph, ex.spec.y, c.B_U, c.F_obs, R, ex.spec.C);
  CHECK_FALSE(find_check(checks, "4")->pass);
  R = ex.spec.R;
  R.pop_back();
  checks = check_identification_conditions(ex.graph, ex.spec.y, c.B_U, c.F_obs, R, ex.spec.C);
  CHECK_FALSE(find_check(checks, "|R|=|C|")->pass);
  // B_U later than the latent parent of y does not block it
  checks = check_identification_conditions(ex.graph, ex.spec.y, {V(0, 0)}, c.F_obs, ex.spec.R, ex.spec.C);
  CHECK_FALSE(find_check(checks, "1")->pass);
}

TEST_CASE("anchored B_U and F") {
  const auto ex = worked_example(ExampleName::Ex3_6);
  auto [B, F] = construct_bu_fobs(ex.graph, SeriesId{1}, 4, ex.spec.y);
  CHECK(B == ex.certificate.B_U);
  CHECK(F == ex.certificate.F_obs);
  for (auto e : {ExampleName::F1, ExampleName::F2}) {
    const auto f = worked_example(e);
    auto [B2, F2] = construct_bu_fobs(f.graph, SeriesId{2}, f.certificate.delta, f.spec.y);
    CHECK(B2 == f.certificate.B_U);
    CHECK(F2 == f.certificate.F_obs);
  }
  const auto f3 = worked_example(ExampleName::F3);
  CHECK_THROWS_AS(construct_bu_fobs(f3.graph, SeriesId{2}, 3, f3.spec.y), SpecError);
  const auto f2 = worked_example(ExampleName::F2);
  CHECK_THROWS_AS(construct_bu_fobs(f2.graph, SeriesId{0}, 1, f2.spec.y), SpecError);
}

TEST_CASE("path systems") {
  LagStructure g(1, 1);
  g.add_edge(SeriesId{0}, SeriesId{0}, 1);
  g.add_edge(SeriesId{1}, SeriesId{0}, 1);
  g.add_edge(SeriesId{1}, SeriesId{0}, 2);
  // U_{t-1} -> Y_{t+1} directly and through U_t, with different monomials
  auto r = check_upsilon_uniqueness(g, {V(0, -1)}, {V(1, 1)});
  CHECK(r.unique);
  CHECK(r.systems == 2);
  REQUIRE(r.witness.paths.size() == 1);
  CHECK(r.witness.paths[0].front() == V(0, -1));
  CHECK(r.witness.paths[0].back() == V(1, 1));
  UpsilonOptions tiny;
  tiny.max_systems = 1;
  CHECK_THROWS_AS(check_upsilon_uniqueness(g, {V(0, -1)}, {V(1, 1)}, tiny), SpecError);
  // no directed path at all
  CHECK_FALSE(check_upsilon_uniqueness(g, {V(0, 5)}, {V(1, 1)}).unique);
  CHECK_THROWS_AS(check_upsilon_uniqueness(g, {V(0, -1)}, {}), SpecError);
}

TEST_CASE("lag-based checks on the worked examples") {
  for (auto e : kExamples) {
    const auto ex = worked_example(e);
    const auto rep = check_conditions_c(ex.graph, ex.spec.y, ex.certificate);
    INFO(ex.name);
    CHECK(rep.passed());
  }
}

TEST_CASE("constructed R") {
  const auto ex = worked_example(ExampleName::Ex3_6);
  CReport rep;
  RPartition part;
  const auto spec = construct_r(ex.graph, ex.spec.y, ex.certificate, {}, &rep, &part);
  CHECK(spec.R == ex.spec.R);
  CHECK(spec.C == ex.spec.C);
  CHECK(part.R1 == VertexSet{V(1, -3), V(1, -2)});
  CHECK(part.R2 == VertexSet{V(1, -4)});
  CHECK(rep.passed());
  for (auto e : {ExampleName::F2, ExampleName::F3}) {
    const auto f = worked_example(e);
    const auto s = construct_r(f.graph, f.spec.y, f.certificate);
    CHECK(as_set(s.R) == as_set(f.spec.R));
  }
  for (auto e : kExamples) {
    const auto f = worked_example(e);
    const auto s = construct_r(f.graph, f.spec.y, f.certificate);
    const auto checks = check_identification_conditions(f.graph, f.spec.y, f.certificate.B_U,
                                                        f.certificate.F_obs, s.R, s.C);
    CHECK(all_pass(checks));
    CHECK(worst_population_error(f.graph, s, 10, 500) < 1e-8);
  }
}

TEST_CASE("delta sweep") {
  const auto ex = worked_example(ExampleName::Ex3_6);
  const auto rs = delta_sweep(ex.graph, ex.spec.y);
  bool has4 = false;
  for (const auto& r : rs) {
    has4 = has4 || r.certificate.delta == 4;
    CHECK(all_pass(r.certificate.checks));
    CHECK(r.spec.R.size() == r.spec.C.size());
  }
  CHECK(has4);
  const auto best = preferred_result(rs);
  REQUIRE(best);
  for (const auto& r : rs) CHECK(rs[*best].spec.max_lag_span() <= r.spec.max_lag_span());

  SweepOptions none;
  none.delta_lo = 3;
  none.delta_hi = 2;
  CHECK(delta_sweep(ex.graph, ex.spec.y, none).empty());
  CHECK_FALSE(preferred_result({}));

  LagStructure noedge(1, 1);
  noedge.add_edge(SeriesId{0}, SeriesId{0}, 1);
  noedge.add_edge(SeriesId{1}, SeriesId{1}, 1);
  CHECK_THROWS_AS(delta_sweep(noedge, V(1, 0)), SpecError);
}

TEST_CASE("every swept spec is population exact") {
  for (auto e : {ExampleName::Ex3_6, ExampleName::F1, ExampleName::F2})
    for (auto mode : {TauMode::Default, TauMode::Tight}) {
      const auto ex = worked_example(e);
      SweepOptions opt;
      opt.tau_mode = mode;
      const auto rs = delta_sweep(ex.graph, ex.spec.y, opt);
      CHECK_FALSE(rs.empty());
      for (const auto& r : rs) {
        INFO(ex.name << " delta " << r.certificate.delta);
        CHECK(worst_population_error(ex.graph, r.spec, 5, 900) < 1e-8);
      }
    }
}

TEST_CASE("sweeps are shift consistent") {
  const auto ex = worked_example(ExampleName::F1);
  const auto a = delta_sweep(ex.graph, ex.spec.y);
  const auto b = delta_sweep(ex.graph, ex.spec.y.shifted(17));
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].certificate.delta == b[i].certificate.delta);
    for (std::size_t j = 0; j < a[i].spec.R.size(); ++j)
      CHECK(a[i].spec.R[j].shifted(17) == b[i].spec.R[j]);
  }
}

}
