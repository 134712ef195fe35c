#include <doctest.h>

#include "helpers.hpp"
#include "svarid/error.hpp"
#include "svarid/graph.hpp"

using namespace svarid;
using svarid::testing::V;

TEST_SUITE("graph") {

TEST_CASE("edge validation") {
  LagStructure g(1, 2);
  CHECK_THROWS_AS(g.add_edge(SeriesId{1}, SeriesId{1}, 0), SpecError);
  CHECK_THROWS_AS(g.add_edge(SeriesId{0}, SeriesId{1}, 2), SpecError);
  CHECK_THROWS_AS(g.add_edge(SeriesId{1}, SeriesId{2}, -1), SpecError);
  CHECK_THROWS_AS(g.add_edge(SeriesId{5}, SeriesId{1}, 1), SpecError);
  g.add_edge(SeriesId{1}, SeriesId{2}, 0);
  CHECK_THROWS_AS(g.add_edge(SeriesId{2}, SeriesId{1}, 0), SpecError);
  // the rejected cycle leaves the structure untouched
  CHECK(g.lags(SeriesId{2}, SeriesId{1}).empty());
  CHECK(g.edge_count() == 1);
  g.add_edge(SeriesId{2}, SeriesId{1}, 3);
  CHECK(g.order() == 3);
  g.add_edge(SeriesId{2}, SeriesId{1}, 3);
  CHECK(g.lags(SeriesId{2}, SeriesId{1}).size() == 1);
}

TEST_CASE("names") {
  LagStructure g(2, 2);
  CHECK(g.name(SeriesId{0}) == "U1");
  CHECK(g.name(SeriesId{3}) == "O2");
  CHECK(g.parse("Y") == g.observed(0));
  CHECK(g.parse("U2") == SeriesId{1});
  CHECK(g.name(V(2, -3)) == "O1_t-3");
  CHECK(g.name(V(2, 0)) == "O1_t");
  CHECK(g.name(V(3, 4)) == "O2_t+4");
  for (int i = 0; i < g.dim(); ++i) CHECK(g.parse(g.name(SeriesId{i})) == SeriesId{i});
  CHECK_THROWS_AS(g.parse("U3"), SpecError);
  CHECK_THROWS_AS(g.parse("Q1"), SpecError);
  CHECK_THROWS_AS(g.parse("O1x"), SpecError);
}

TEST_CASE("contemporaneous order respects lag-0 edges") {
  LagStructure g(1, 3);
  g.add_edge(SeriesId{1}, SeriesId{3}, 0);
  g.add_edge(SeriesId{3}, SeriesId{2}, 0);
  g.add_edge(SeriesId{2}, SeriesId{0}, 0);
  const auto& order = g.contemporaneous_order();
  auto pos = [&](int s) { return std::find(order.begin(), order.end(), SeriesId{s}) - order.begin(); };
  CHECK(pos(0) < pos(2));
  CHECK(pos(2) < pos(3));
  CHECK(pos(3) < pos(1));
}

TEST_CASE("parents and children of the one-confounder example") {
  const auto g = worked_example(ExampleName::Ex3_6).graph;
  CHECK(parents(g, V(1, 0)) == VertexSet{V(0, -1), V(1, -3)});
  CHECK(parents(g, V(1, 0), KindFilter::Latent) == VertexSet{V(0, -1)});
  CHECK(parents(g, V(1, 0), KindFilter::Observed) == VertexSet{V(1, -3)});
  CHECK(children(g, V(0, 0)) == VertexSet{V(0, 1), V(1, 1)});
}

TEST_CASE("residue classes") {
  const auto g = worked_example(ExampleName::Ex3_6).graph;
  const SeriesId Y{1};
  CHECK(same_residue_class(g, Y, 0, -3, 3));
  CHECK(same_residue_class(g, Y, 0, -2, 4));
  CHECK_FALSE(same_residue_class(g, Y, 0, -1, 0));
  CHECK(same_residue_class(g, SeriesId{0}, 0, 7, -11));
  CHECK(same_residue_class_for_lag(4, -5, 3));
  LagStructure h(0, 2);
  CHECK_THROWS_AS(same_residue_class(h, SeriesId{0}, 0, 0, 1), SpecError);
}

TEST_CASE("latent ancestry blocking") {
  const auto g = worked_example(ExampleName::Ex3_6).graph;
  CHECK(latent_ancestry_blocked(g, V(0, 0), {V(0, -1)}));
  CHECK(latent_ancestry_blocked(g, V(0, 0), {V(0, -3)}));
  CHECK_FALSE(latent_ancestry_blocked(g, V(0, 0), {V(0, 0)}));
  CHECK_FALSE(latent_ancestry_blocked(g, V(0, 0), {}));
  CHECK_THROWS_AS(latent_ancestry_blocked(g, V(1, 0), {V(0, -1)}), SpecError);
  CHECK_THROWS_AS(latent_ancestry_blocked(g, V(0, 0), {V(1, -1)}), SpecError);
  // a latent series without latent parents is trivially blocked
  LagStructure h(1, 1);
  h.add_edge(SeriesId{1}, SeriesId{0}, 1);
  CHECK(latent_ancestry_blocked(h, V(0, 0), {}));
}

TEST_CASE("bounded latent ancestors") {
  const auto g = worked_example(ExampleName::Ex3_6).graph;
  const auto anc = latent_ancestors_bounded(g, {V(0, 2)}, {V(0, -1)});
  CHECK(anc == VertexSet{V(0, -1), V(0, 0), V(0, 1)});
  CHECK_THROWS_AS(latent_ancestors_bounded(g, {V(0, 2)}, {V(0, 5)}), SpecError);
  SearchLimits tiny;
  tiny.max_vertices = 2;
  CHECK_THROWS_AS(latent_ancestors_bounded(g, {V(0, 2)}, {V(0, -10)}, tiny), SpecError);
}

TEST_CASE("descendants") {
  const auto g = worked_example(ExampleName::Ex3_6).graph;
  CHECK(is_descendant(g, V(0, 0), V(1, 1)));
  CHECK(is_descendant(g, V(0, 0), V(1, 7)));
  CHECK(is_descendant(g, V(1, 0), V(1, 0)));
  CHECK_FALSE(is_descendant(g, V(1, 0), V(0, 5)));
  CHECK_FALSE(is_descendant(g, V(1, 0), V(1, 1)));
  CHECK(is_descendant(g, V(1, 0), V(1, 6)));
  CHECK_FALSE(is_descendant(g, V(0, 3), V(1, 1)));
}

TEST_CASE("forbidden ancestors of the one-confounder example") {
  const auto ex = worked_example(ExampleName::Ex3_6);
  const auto fa = forb_an(ex.graph, ex.certificate.B_U, ex.certificate.F_obs, ex.spec.y);
  CHECK(fa == VertexSet{V(0, 0), V(0, 1), V(0, 2), V(0, 3), V(1, 0), V(1, 4)});
}

TEST_CASE("forbidden ancestors shift with their inputs") {
  for (auto e : {ExampleName::Ex3_6, ExampleName::F1, ExampleName::F2, ExampleName::F3}) {
    const auto ex = worked_example(e);
    const auto& c = ex.certificate;
    const auto base = forb_an(ex.graph, c.B_U, c.F_obs, ex.spec.y);
    for (std::int64_t s : {-7, 3, 11}) {
      const auto moved = forb_an(ex.graph, shifted(c.B_U, s), shifted(c.F_obs, s), ex.spec.y.shifted(s));
      CHECK(moved == shifted(base, s));
    }
    CHECK(set_difference(c.F_obs, base).empty());
    CHECK(base.count(ex.spec.y) == 1);
  }
}

TEST_CASE("tau assignment against the worked examples") {
  for (auto e : {ExampleName::Ex3_6, ExampleName::F1, ExampleName::F2, ExampleName::F3}) {
    const auto ex = worked_example(e);
    const auto& worked = ex.certificate.tau;
    const auto fa = forb_an(ex.graph, ex.certificate.B_U, ex.certificate.F_obs, ex.spec.y);
    Certificate dflt = ex.certificate, tight = ex.certificate;
    assign_taus(ex.graph, ex.spec.y, dflt, TauMode::Default);
    assign_taus(ex.graph, ex.spec.y, tight, TauMode::Tight);
    for (int k = 0; k < ex.graph.d_observed(); ++k) {
      const auto s = ex.graph.observed(k);
      const auto i = static_cast<std::size_t>(k);
      CHECK(dflt.tau[i] == -t_inf(fa) + 1);
      CHECK(is_valid_tau(ex.graph, fa, s, 0, worked[i]));
      CHECK(is_valid_tau(ex.graph, fa, s, 0, dflt.tau[i]));
      CHECK(is_valid_tau(ex.graph, fa, s, 0, tight.tau[i]));
      CHECK_FALSE(is_valid_tau(ex.graph, fa, s, 0, tight.tau[i] - 1));
      CHECK(tight.tau[i] <= worked[i]);
      CHECK(tight.tau[i] <= dflt.tau[i]);
    }
  }
  // the one-confounder example states tau_Y = 1 and it is tight
  const auto ex = worked_example(ExampleName::Ex3_6);
  Certificate c = ex.certificate;
  assign_taus(ex.graph, ex.spec.y, c, TauMode::Tight);
  CHECK(c.tau == std::vector<std::int64_t>{1});
}

TEST_CASE("earliest descendant times match brute force") {
  const auto ex = worked_example(ExampleName::F2);
  const auto fa = forb_an(ex.graph, ex.certificate.B_U, ex.certificate.F_obs, ex.spec.y);
  const auto times = earliest_descendant_times(ex.graph, fa);
  for (int s = 0; s < ex.graph.dim(); ++s) {
    std::int64_t brute = std::numeric_limits<std::int64_t>::max();
    for (std::int64_t t = -20; t <= 20 && brute == std::numeric_limits<std::int64_t>::max(); ++t)
      if (is_descendant_of_any(ex.graph, fa, V(s, t))) brute = t;
    CHECK(times[static_cast<std::size_t>(s)] == brute);
  }
}

TEST_CASE("set helpers") {
  const VertexSet a{V(0, 1), V(1, -2)};
  const VertexSet b{V(1, -2), V(2, 5)};
  CHECK(t_inf(a) == -2);
  CHECK(t_sup(b) == 5);
  CHECK(set_union(a, b).size() == 3);
  CHECK(set_intersection(a, b) == VertexSet{V(1, -2)});
  CHECK(set_difference(a, b) == VertexSet{V(0, 1)});
  CHECK(shifted(a, 2) == VertexSet{V(0, 3), V(1, 0)});
  CHECK_THROWS_AS(t_inf(VertexSet{}), SpecError);
}

}
