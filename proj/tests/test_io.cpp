#include <doctest.h>

#include <filesystem>
#include <limits>
#include <sstream>

#include "helpers.hpp"
#include "svarid/error.hpp"
#include "svarid/io.hpp"

using namespace svarid;

namespace {

bool same_columns(const std::vector<CoeffColumn>& a, const std::vector<CoeffColumn>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].column != b[i].column || a[i].lag != b[i].lag || a[i].target != b[i].target ||
        a[i].source != b[i].source || a[i].superset != b[i].superset)
      return false;
  return true;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("graph and params roundtrip") {
  for (auto e : {ExampleName::Ex3_6, ExampleName::F1, ExampleName::F2, ExampleName::F3}) {
    const auto g = worked_example(e).graph;
    CHECK(graph_from_json(Json::parse(graph_to_json(g).dump())) == g);
    const auto p = svarid::testing::stable_draw(g, 5);
    const auto q = params_from_json(Json::parse(params_to_json(p).dump()));
    CHECK(q.graph == g);
    CHECK(q.noise_var == p.noise_var);
    CHECK(q.coeffs == p.coeffs);
  }
}

TEST_CASE("vertex naming") {
  const auto g = worked_example(ExampleName::F3).graph;
  const Vertex v{SeriesId{3}, -4};
  const auto j = vertex_to_json(g, v);
  CHECK(j["series"] == "O2");
  CHECK(j["time"] == -4);
  CHECK(vertex_from_json(g, j) == v);
  CHECK(vertex_to_json(g, {SeriesId{1}, 0})["series"] == "U2");
  CHECK_THROWS_AS(vertex_from_json(g, Json{{"series", "O3"}, {"time", 0}}), SpecError);
  CHECK_THROWS_AS(vertex_from_json(g, Json{{"series", "O1"}}), SpecError);
}

TEST_CASE("spec roundtrip") {
  for (auto e : {ExampleName::Ex3_6, ExampleName::F1, ExampleName::F2, ExampleName::F3}) {
    const auto ex = worked_example(e);
    const auto j = Json::parse(spec_to_json(ex.graph, ex.spec).dump());
    const auto s = spec_from_json(j);
    CHECK(s.y == ex.spec.y);
    CHECK(s.R == ex.spec.R);
    CHECK(s.C == ex.spec.C);
    CHECK(same_columns(s.coeff_map, ex.spec.coeff_map));
    CHECK(naming_frame(j).dim() == ex.graph.dim());
  }
}

TEST_CASE("configuration roundtrip") {
  RandomGraphProtocol pr;
  pr.m_lo = 2;
  pr.params_per_graph = 4;
  const auto q = protocol_from_json(protocol_to_json(pr));
  CHECK(q.m_lo == 2);
  CHECK(q.params_per_graph == 4);
  CHECK(protocol_to_json(q) == protocol_to_json(pr));

  auto m = ElectricityModel::defaults(ElectricityVariant::Model2);
  m.wind_ar = {0.3, 0.1};
  const auto n = electricity_from_json(electricity_to_json(m));
  CHECK(n.variant == ElectricityVariant::Model2);
  CHECK(n.wind_ar == m.wind_ar);
  CHECK(electricity_to_json(n) == electricity_to_json(m));
}

TEST_CASE("doubles print shortest and parse back exactly") {
  for (double x : {0.1, -100.0, 1e-300, 2.0 / 3.0, 123456789.125, 0.0})
    CHECK(std::stod(format_double(x)) == x);
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-100.0) == "-100");
}

TEST_CASE("series CSV roundtrip") {
  Table t;
  t.names = {"O1", "O2"};
  t.data.resize(2, 3);
  t.data << 0.1, -2.5, 1e-17, 3.0, 2.0 / 3.0, -7.0;
  std::stringstream ss;
  write_series_csv(ss, t);
  CHECK(ss.str().rfind("O1,O2\n", 0) == 0);
  const auto back = read_series_csv(ss);
  CHECK(back.names == t.names);
  CHECK(back.data == t.data);

  const auto g = worked_example(ExampleName::F1).graph;
  Table swapped;
  swapped.names = {"O2", "O1"};
  swapped.data = t.data;
  const auto m = data_for_frame(g, swapped);
  CHECK(m.row(2) == t.data.row(0));
  CHECK(m.row(1) == t.data.row(1));
  CHECK(m.row(0).isZero());
}

TEST_CASE("malformed inputs are spec errors") {
  std::stringstream ragged("O1,O2\n1,2\n3\n");
  CHECK_THROWS_AS(read_series_csv(ragged), SpecError);
  std::stringstream text("O1\nabc\n");
  CHECK_THROWS_AS(read_series_csv(text), SpecError);
  std::stringstream empty("");
  CHECK_THROWS_AS(read_series_csv(empty), SpecError);
  Table dup;
  dup.names = {"O1", "O1"};
  dup.data = Eigen::MatrixXd::Zero(2, 2);
  CHECK_THROWS_AS(data_for_frame(worked_example(ExampleName::F1).graph, dup), SpecError);
  CHECK_THROWS_AS(graph_from_json(Json{{"d_U", 1}}), SpecError);
  CHECK_THROWS_AS(graph_from_json(Json::parse(R"({"d_U":0,"d_O":1,"p":1,"edges":[{"target":"O1","source":"O1","lags":[-1]}]})")), SpecError);
  CHECK_THROWS_AS(params_from_json(Json::array()), SpecError);
  CHECK_THROWS_AS(read_json("/nonexistent/file.json"), SpecError);
}

TEST_CASE("json files") {
  const auto dir = std::filesystem::temp_directory_path() / "svarid_io_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "x.json").string();
  const Json j{{"a", 1}, {"b", {1.5, 2.5}}};
  write_json(path, j);
  CHECK(read_json(path) == j);
  std::filesystem::remove_all(dir);
}

}
