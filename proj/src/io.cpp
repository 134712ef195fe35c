#include "svarid/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "svarid/error.hpp"

namespace svarid {

namespace {

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : it->get<T>();
}

const Json& require(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw SpecError(std::string("missing field '") + key + "'");
  return *it;
}

std::vector<Vertex> vertex_list(const LagStructure& g, const Json& j) {
  if (!j.is_array()) throw SpecError("expected an array of vertices");
  std::vector<Vertex> out;
  for (const auto& v : j) out.push_back(vertex_from_json(g, v));
  return out;
}

Json vertex_list_json(const LagStructure& g, const std::vector<Vertex>& vs) {
  Json a = Json::array();
  for (const auto& v : vs) a.push_back(vertex_to_json(g, v));
  return a;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw SpecError("cannot write " + path);
  return os;
}

}  // namespace

Json graph_to_json(const LagStructure& g) {
  Json edges = Json::array();
  for (int t = 0; t < g.dim(); ++t)
    for (int s = 0; s < g.dim(); ++s) {
      const auto& ls = g.lags(SeriesId{t}, SeriesId{s});
      if (ls.empty()) continue;
      edges.push_back({{"target", g.name(SeriesId{t})},
                       {"source", g.name(SeriesId{s})},
                       {"lags", ls}});
    }
  return {{"d_U", g.d_latent()}, {"d_O", g.d_observed()}, {"p", g.order()}, {"edges", edges}};
}

LagStructure graph_from_json(const Json& j) {
  try {
    LagStructure g(require(j, "d_U").get<int>(), require(j, "d_O").get<int>());
    for (const auto& e : require(j, "edges")) {
      const auto t = g.parse(require(e, "target").get<std::string>());
      const auto s = g.parse(require(e, "source").get<std::string>());
      for (int l : require(e, "lags").get<std::vector<int>>()) g.add_edge(t, s, l);
    }
    if (j.contains("p") && j["p"].get<int>() != g.order())
      throw SpecError("declared p does not match the largest lag");
    return g;
  } catch (const Json::exception& e) {
    throw SpecError(std::string("graph JSON: ") + e.what());
  }
}

Json params_to_json(const SvarParams& p) {
  Json coeffs = Json::array();
  for (std::size_t h = 0; h < p.coeffs.size(); ++h) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < p.coeffs[h].rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(p.coeffs[h].cols()));
      for (Eigen::Index c = 0; c < p.coeffs[h].cols(); ++c)
        row[static_cast<std::size_t>(c)] = p.coeffs[h](r, c);
      rows.push_back(row);
    }
    coeffs.push_back({{"lag", h}, {"matrix", rows}});
  }
  std::vector<double> nv(p.noise_var.data(), p.noise_var.data() + p.noise_var.size());
  return {{"graph", graph_to_json(p.graph)}, {"coefficients", coeffs}, {"noise_var", nv}};
}

SvarParams params_from_json(const Json& j) {
  try {
    SvarParams p = SvarParams::zeros(graph_from_json(require(j, "graph")));
    const int d = p.dim();
    for (const auto& c : require(j, "coefficients")) {
      const int h = require(c, "lag").get<int>();
      if (h < 0 || h > p.order()) throw SpecError("coefficient lag out of range");
      const auto rows = require(c, "matrix").get<std::vector<std::vector<double>>>();
      if (static_cast<int>(rows.size()) != d) throw SpecError("coefficient matrix has wrong shape");
      for (int r = 0; r < d; ++r) {
        if (static_cast<int>(rows[static_cast<std::size_t>(r)].size()) != d)
          throw SpecError("coefficient matrix has wrong shape");
        for (int s = 0; s < d; ++s) {
          const double v = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)];
          p.coeffs[static_cast<std::size_t>(h)](r, s) = v;
        }
      }
    }
    if (j.contains("noise_var")) {
      const auto nv = j["noise_var"].get<std::vector<double>>();
      if (static_cast<int>(nv.size()) != d) throw SpecError("noise_var has wrong length");
      for (int i = 0; i < d; ++i) p.noise_var(i) = nv[static_cast<std::size_t>(i)];
    }
    p.validate();
    return p;
  } catch (const Json::exception& e) {
    throw SpecError(std::string("params JSON: ") + e.what());
  }
}

Json vertex_to_json(const LagStructure& g, const Vertex& v) {
  return {{"series", g.name(v.series)}, {"time", v.time}};
}

Vertex vertex_from_json(const LagStructure& g, const Json& j) {
  try {
    return {g.parse(require(j, "series").get<std::string>()),
            require(j, "time").get<std::int64_t>()};
  } catch (const Json::exception& e) {
    throw SpecError(std::string("vertex JSON: ") + e.what());
  }
}

Json vertex_set_to_json(const LagStructure& g, const VertexSet& vs) {
  return vertex_list_json(g, std::vector<Vertex>(vs.begin(), vs.end()));
}

Json spec_to_json(const LagStructure& g, const EstimatorSpec& s) {
  Json cols = Json::array();
  for (const auto& c : s.coeff_map)
    cols.push_back({{"column", c.column},
                    {"lag", c.lag},
                    {"target", g.name(c.target)},
                    {"source", g.name(c.source)},
                    {"superset", c.superset}});
  return {{"d_U", g.d_latent()},
          {"d_O", g.d_observed()},
          {"y", vertex_to_json(g, s.y)},
          {"R", vertex_list_json(g, s.R)},
          {"C", vertex_list_json(g, s.C)},
          {"coeff_map", cols},
          {"max_lag_span", s.max_lag_span()},
          {"provenance", s.provenance}};
}

LagStructure naming_frame(const Json& spec) {
  try {
    return LagStructure(require(spec, "d_U").get<int>(), require(spec, "d_O").get<int>());
  } catch (const Json::exception& e) {
    throw SpecError(std::string("spec JSON: ") + e.what());
  }
}

EstimatorSpec spec_from_json(const Json& j) {
  const auto g = naming_frame(j);
  try {
    EstimatorSpec s;
    s.y = vertex_from_json(g, require(j, "y"));
    s.R = vertex_list(g, require(j, "R"));
    s.C = vertex_list(g, require(j, "C"));
    if (s.R.size() != s.C.size()) throw SpecError("spec needs |R| = |C|");
    for (const auto& c : require(j, "coeff_map")) {
      CoeffColumn col;
      col.column = require(c, "column").get<int>();
      col.lag = require(c, "lag").get<int>();
      col.target = g.parse(require(c, "target").get<std::string>());
      col.source = g.parse(require(c, "source").get<std::string>());
      col.superset = get_or<bool>(c, "superset", false);
      if (col.column < 0 || col.column >= static_cast<int>(s.C.size()))
        throw SpecError("coeff_map column out of range");
      if (col.lag < 0) throw SpecError("coeff_map lag must be nonnegative");
      s.coeff_map.push_back(col);
    }
    s.provenance = get_or<std::string>(j, "provenance", "");
    return s;
  } catch (const Json::exception& e) {
    throw SpecError(std::string("spec JSON: ") + e.what());
  }
}

Json checks_to_json(const std::vector<Check>& checks) {
  Json a = Json::array();
  for (const auto& c : checks)
    a.push_back({{"name", c.name}, {"pass", c.pass}, {"witness", c.witness}});
  return a;
}

Json certificate_to_json(const LagStructure& g, const Certificate& c) {
  Json tau = Json::object();
  for (std::size_t i = 0; i < c.tau.size(); ++i)
    tau[g.name(g.observed(static_cast<int>(i)))] = c.tau[i];
  return {{"B_U", vertex_set_to_json(g, c.B_U)},
          {"F_obs", vertex_set_to_json(g, c.F_obs)},
          {"delta", c.delta},
          {"anchor", g.name(c.anchor)},
          {"tau", tau},
          {"checks", checks_to_json(c.checks)}};
}

Json sweep_to_json(const LagStructure& g, const std::vector<SweepResult>& rs) {
  Json a = Json::array();
  for (const auto& r : rs)
    a.push_back({{"certificate", certificate_to_json(g, r.certificate)},
                 {"spec", spec_to_json(g, r.spec)}});
  Json out = {{"results", a}};
  const auto best = preferred_result(rs);
  out["preferred"] = best ? Json(*best) : Json(nullptr);
  return out;
}

Json estimate_to_json(const LagStructure& g, const EffectEstimate& e) {
  Json coeffs = Json::object();
  Json cols = Json::array();
  for (std::size_t i = 0; i < e.columns.size(); ++i) {
    const auto& c = e.columns[i];
    coeffs[coefficient_label(g, c)] = e.coefficients[i];
    cols.push_back({{"key", coefficient_label(g, c)}, {"column", c.column}, {"superset", c.superset}});
  }
  std::vector<double> full(e.full_solution.data(), e.full_solution.data() + e.full_solution.size());
  return {{"coefficients", coeffs},
          {"columns", cols},
          {"solution", full},
          {"condition", e.condition},
          {"provenance", e.provenance}};
}

Json bootstrap_to_json(const LagStructure& g, const BootstrapSummary& b) {
  Json out = {{"point", estimate_to_json(g, b.point)},
              {"successful", b.replicates.size()},
              {"failures", b.failures}};
  Json q = Json::object();
  for (std::size_t i = 0; i < b.point.columns.size(); ++i)
    q[coefficient_label(g, b.point.columns[i])] = {
        {"q025", b.q025[i]}, {"median", b.median[i]}, {"q975", b.q975[i]}};
  out["quantiles"] = q;
  return out;
}

Json covariance_to_json(const LagStructure& g, const CovarianceTable& t) {
  Json lags = Json::array();
  for (int h = 0; h <= t.h_max(); ++h) {
    const auto m = t.at(h);
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(m.cols()));
      for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
      rows.push_back(row);
    }
    lags.push_back({{"lag", h}, {"matrix", rows}});
  }
  std::vector<std::string> names;
  for (int i = 0; i < g.dim(); ++i) names.push_back(g.name(SeriesId{i}));
  return {{"series", names}, {"exact", t.exact()}, {"sample_size", t.sample_size()}, {"gamma", lags}};
}

Json protocol_to_json(const RandomGraphProtocol& p) {
  Json j = {{"m_lo", p.m_lo},
            {"m_hi", p.m_hi},
            {"m_YX", p.m_YX},
            {"m_XY", p.m_XY},
            {"cross_lag_lo", p.cross_lag_lo},
            {"cross_lag_hi", p.cross_lag_hi},
            {"self_lag_lo", p.self_lag_lo},
            {"self_lag_hi", p.self_lag_hi},
            {"coef_lo", p.coefficients.lo},
            {"coef_hi", p.coefficients.hi},
            {"max_margin", p.coefficients.max_margin},
            {"max_retries", p.coefficients.max_retries},
            {"params_per_graph", p.params_per_graph},
            {"tight_tau", p.tau_mode == TauMode::Tight}};
  j["delta_lo"] = p.delta_lo ? Json(*p.delta_lo) : Json(nullptr);
  j["delta_hi"] = p.delta_hi ? Json(*p.delta_hi) : Json(nullptr);
  return j;
}

RandomGraphProtocol protocol_from_json(const Json& j) {
  try {
    RandomGraphProtocol p;
    p.m_lo = get_or(j, "m_lo", p.m_lo);
    p.m_hi = get_or(j, "m_hi", p.m_hi);
    p.m_YX = get_or(j, "m_YX", p.m_YX);
    p.m_XY = get_or(j, "m_XY", p.m_XY);
    p.cross_lag_lo = get_or(j, "cross_lag_lo", p.cross_lag_lo);
    p.cross_lag_hi = get_or(j, "cross_lag_hi", p.cross_lag_hi);
    p.self_lag_lo = get_or(j, "self_lag_lo", p.self_lag_lo);
    p.self_lag_hi = get_or(j, "self_lag_hi", p.self_lag_hi);
    p.coefficients.lo = get_or(j, "coef_lo", p.coefficients.lo);
    p.coefficients.hi = get_or(j, "coef_hi", p.coefficients.hi);
    p.coefficients.max_margin = get_or(j, "max_margin", p.coefficients.max_margin);
    p.coefficients.max_retries = get_or(j, "max_retries", p.coefficients.max_retries);
    p.params_per_graph = get_or(j, "params_per_graph", p.params_per_graph);
    if (get_or(j, "tight_tau", false)) p.tau_mode = TauMode::Tight;
    if (j.contains("delta_lo") && !j["delta_lo"].is_null()) p.delta_lo = j["delta_lo"].get<std::int64_t>();
    if (j.contains("delta_hi") && !j["delta_hi"].is_null()) p.delta_hi = j["delta_hi"].get<std::int64_t>();
    if (p.m_lo < 0 || p.m_lo > p.m_hi) throw SpecError("bad m range");
    if (p.self_lag_lo < 1) throw SpecError("self lags start at 1");
    if (p.cross_lag_lo < 0 || p.cross_lag_lo > p.cross_lag_hi || p.self_lag_lo > p.self_lag_hi)
      throw SpecError("bad lag pool");
    if (p.params_per_graph < 1) throw SpecError("params_per_graph must be positive");
    return p;
  } catch (const Json::exception& e) {
    throw SpecError(std::string("protocol JSON: ") + e.what());
  }
}

Json electricity_to_json(const ElectricityModel& m) {
  return {{"variant", static_cast<int>(m.variant)},
          {"beta_P", m.beta_P},
          {"beta_P1", m.beta_P1},
          {"beta_D1", m.beta_D1},
          {"beta_B1", m.beta_B1},
          {"gamma_P", m.gamma_P},
          {"gamma_W", m.gamma_W},
          {"S0", m.S0},
          {"D0", m.D0},
          {"B0", m.B0},
          {"var_UD", m.var_UD},
          {"var_US", m.var_US},
          {"var_UA", m.var_UA},
          {"var_UB", m.var_UB},
          {"wind_ar", m.wind_ar},
          {"wind_var", m.wind_var}};
}

ElectricityModel electricity_from_json(const Json& j) {
  try {
    const auto v = j.contains("variant") ? parse_variant(j["variant"].is_string()
                                                             ? j["variant"].get<std::string>()
                                                             : std::to_string(j["variant"].get<int>()))
                                         : ElectricityVariant::Model1;
    auto m = ElectricityModel::defaults(v);
    m.beta_P = get_or(j, "beta_P", m.beta_P);
    m.beta_P1 = get_or(j, "beta_P1", m.beta_P1);
    m.beta_D1 = get_or(j, "beta_D1", m.beta_D1);
    m.beta_B1 = get_or(j, "beta_B1", m.beta_B1);
    m.gamma_P = get_or(j, "gamma_P", m.gamma_P);
    m.gamma_W = get_or(j, "gamma_W", m.gamma_W);
    m.S0 = get_or(j, "S0", m.S0);
    m.D0 = get_or(j, "D0", m.D0);
    m.B0 = get_or(j, "B0", m.B0);
    m.var_UD = get_or(j, "var_UD", m.var_UD);
    m.var_US = get_or(j, "var_US", m.var_US);
    m.var_UA = get_or(j, "var_UA", m.var_UA);
    m.var_UB = get_or(j, "var_UB", m.var_UB);
    m.wind_ar = get_or(j, "wind_ar", m.wind_ar);
    m.wind_var = get_or(j, "wind_var", m.wind_var);
    m.validate();
    return m;
  } catch (const Json::exception& e) {
    throw SpecError(std::string("electricity JSON: ") + e.what());
  }
}

Json read_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw SpecError("cannot read " + path);
  try {
    return Json::parse(is);
  } catch (const Json::exception& e) {
    throw SpecError(path + ": " + e.what());
  }
}

void write_json(const std::string& path, const Json& j) {
  auto os = open_out(path);
  os << j.dump(2) << '\n';
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

void write_series_csv(std::ostream& os, const Table& t) {
  if (static_cast<Eigen::Index>(t.names.size()) != t.data.rows())
    throw SpecError("column names do not match the data");
  for (std::size_t i = 0; i < t.names.size(); ++i) os << (i ? "," : "") << t.names[i];
  os << '\n';
  for (Eigen::Index c = 0; c < t.data.cols(); ++c) {
    for (Eigen::Index r = 0; r < t.data.rows(); ++r) os << (r ? "," : "") << format_double(t.data(r, c));
    os << '\n';
  }
}

void write_series_csv(const std::string& path, const Table& t) {
  auto os = open_out(path);
  write_series_csv(os, t);
}

Table read_series_csv(std::istream& is) {
  Table t;
  std::string line;
  if (!std::getline(is, line)) throw SpecError("empty CSV");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
      t.names.push_back(cell);
    }
  }
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t n = 0;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      const char* b = cell.data();
      while (b < cell.data() + cell.size() && *b == ' ') ++b;
      auto [p, ec] = std::from_chars(b, cell.data() + cell.size(), v);
      if (ec != std::errc()) throw SpecError("bad number '" + cell + "' in CSV");
      values.push_back(v);
      ++n;
    }
    if (n != t.names.size())
      throw SpecError("CSV row " + std::to_string(rows + 2) + " has " + std::to_string(n) +
                      " fields, expected " + std::to_string(t.names.size()));
    ++rows;
  }
  t.data.resize(static_cast<Eigen::Index>(t.names.size()), static_cast<Eigen::Index>(rows));
  for (std::size_t c = 0; c < rows; ++c)
    for (std::size_t r = 0; r < t.names.size(); ++r)
      t.data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[c * t.names.size() + r];
  return t;
}

Table read_series_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw SpecError("cannot read " + path);
  return read_series_csv(is);
}

Table series_table(const LagStructure& g, const Eigen::MatrixXd& data, bool observed_only) {
  if (data.rows() != g.dim()) throw SpecError("data rows do not match the graph");
  Table t;
  const int first = observed_only ? g.d_latent() : 0;
  for (int i = first; i < g.dim(); ++i) t.names.push_back(g.name(SeriesId{i}));
  t.data = data.bottomRows(g.dim() - first);
  return t;
}

Eigen::MatrixXd data_for_frame(const LagStructure& frame, const Table& t) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(frame.dim(), t.data.cols());
  std::vector<bool> seen(static_cast<std::size_t>(frame.dim()), false);
  for (std::size_t i = 0; i < t.names.size(); ++i) {
    const auto s = frame.parse(t.names[i]);
    if (seen[static_cast<std::size_t>(s.index)]) throw SpecError("duplicate column " + t.names[i]);
    seen[static_cast<std::size_t>(s.index)] = true;
    out.row(s.index) = t.data.row(static_cast<Eigen::Index>(i));
  }
  return out;
}

void write_error_rows_csv(const std::string& path, const std::vector<ErrorRow>& rows) {
  auto os = open_out(path);
  os << "instance,T,param_draw,coefficient,truth,estimate,abs_error\n";
  for (const auto& r : rows)
    os << r.instance << ',' << r.T << ',' << r.param_draw << ',' << r.coefficient << ','
       << format_double(r.truth) << ',' << format_double(r.estimate) << ','
       << format_double(r.abs_error) << '\n';
}

void write_median_rows_csv(const std::string& path, const std::vector<MedianRow>& rows) {
  auto os = open_out(path);
  os << "instance,T,coefficient,median_abs_error,failures\n";
  for (const auto& r : rows)
    os << r.instance << ',' << r.T << ',' << r.coefficient << ','
       << format_double(r.median_abs_error) << ',' << r.failures << '\n';
}

}  // namespace svarid
