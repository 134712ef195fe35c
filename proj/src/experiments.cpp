#include "svarid/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

#include "svarid/error.hpp"
#include "svarid/rng.hpp"

namespace svarid {

namespace {

struct ExampleEdge {
  int target;
  int source;
  std::vector<int> lags;
};

LagStructure build_graph(int d_u, int d_o, const std::vector<ExampleEdge>& edges) {
  LagStructure g(d_u, d_o);
  for (const auto& e : edges)
    for (int l : e.lags) g.add_edge(SeriesId{e.target}, SeriesId{e.source}, l);
  return g;
}

std::vector<Vertex> vertices(const std::vector<std::pair<int, std::int64_t>>& vs) {
  std::vector<Vertex> out;
  out.reserve(vs.size());
  for (const auto& [s, t] : vs) out.push_back({SeriesId{s}, t});
  return out;
}

WorkedExample assemble(std::string name, LagStructure g, VertexSet B_U,
                       VertexSet F, std::int64_t delta, SeriesId anchor,
                       std::vector<std::int64_t> tau, std::vector<Vertex> C,
                       std::vector<Vertex> R) {
  WorkedExample ex;
  ex.name = std::move(name);
  ex.graph = std::move(g);
  const SeriesId Y = ex.graph.observed(0);
  const Vertex y{Y, 0};
  ex.certificate.B_U = std::move(B_U);
  ex.certificate.F_obs = std::move(F);
  ex.certificate.delta = delta;
  ex.certificate.anchor = anchor;
  ex.certificate.tau = std::move(tau);
  ex.spec.y = y;
  ex.spec.C = std::move(C);
  ex.spec.R = std::move(R);
  ex.spec.coeff_map = make_coeff_map(ex.graph, y, ex.spec.C);
  ex.spec.provenance = "worked example " + ex.name;
  return ex;
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

std::vector<int> sample_lags(std::mt19937_64& rng, int m, int lo, int hi) {
  std::vector<int> pool(static_cast<std::size_t>(hi - lo + 1));
  std::iota(pool.begin(), pool.end(), lo);
  m = std::min<int>(m, static_cast<int>(pool.size()));
  // Partial Fisher-Yates keeps the draw independent of std::shuffle's
  // implementation.
  for (int i = 0; i < m; ++i) {
    const int j = uniform_int(rng, i, static_cast<int>(pool.size()) - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(m));
  std::sort(pool.begin(), pool.end());
  return pool;
}

double median_of(std::vector<double> v) { return quantile(std::move(v), 0.5); }

}  // namespace

ExampleName parse_example(const std::string& name) {
  if (name == "Ex3_6" || name == "ex3_6") return ExampleName::Ex3_6;
  if (name == "F1" || name == "f1") return ExampleName::F1;
  if (name == "F2" || name == "f2") return ExampleName::F2;
  if (name == "F3" || name == "f3") return ExampleName::F3;
  throw SpecError("unknown example '" + name + "'");
}

std::string example_name(ExampleName e) {
  switch (e) {
    case ExampleName::Ex3_6: return "Ex3_6";
    case ExampleName::F1: return "F1";
    case ExampleName::F2: return "F2";
    case ExampleName::F3: return "F3";
  }
  return "?";
}

WorkedExample worked_example(ExampleName e) {
  switch (e) {
    case ExampleName::Ex3_6: {
      // U = 0, Y = 1
      auto g = build_graph(1, 1, {{0, 0, {1}}, {1, 1, {3}}, {1, 0, {1}}});
      return assemble("Ex3_6", std::move(g), {{SeriesId{0}, -1}},
                      {{SeriesId{1}, 4}}, 4, SeriesId{1}, {1},
                      vertices({{1, -3}, {1, 4}, {1, 1}}),
                      vertices({{1, -3}, {1, -2}, {1, -4}}));
    }
    case ExampleName::F1: {
      // U = 0, Y = 1, X = 2
      auto g = build_graph(1, 2,
                           {{0, 0, {1, 2}},
                            {1, 1, {1}},
                            {2, 2, {1}},
                            {1, 2, {5}},
                            {1, 0, {2, 3}},
                            {2, 0, {1, 2}}});
      return assemble("F1", std::move(g), {{SeriesId{0}, -3}, {SeriesId{0}, -2}},
                      {{SeriesId{2}, 2}, {SeriesId{2}, 3}}, 2, SeriesId{2}, {2, 3},
                      vertices({{2, -5}, {1, -1}, {2, 2}, {2, 3}, {2, 1}}),
                      vertices({{2, -5}, {1, -2}, {2, -3}, {2, -6}, {2, -7}}));
    }
    case ExampleName::F2: {
      auto g = build_graph(1, 2,
                           {{0, 0, {1}},
                            {1, 1, {1, 3}},
                            {2, 2, {2}},
                            {1, 2, {3}},
                            {2, 1, {1}},
                            {1, 0, {1, 2}},
                            {2, 0, {4, 5}}});
      return assemble("F2", std::move(g), {{SeriesId{0}, -3}}, {{SeriesId{2}, 2}},
                      2, SeriesId{2}, {3, 1},
                      vertices({{2, -3}, {1, -1}, {1, -3}, {2, 2}, {2, 0}, {1, 1}}),
                      vertices({{2, -3}, {1, -5}, {1, -4}, {1, -3}, {2, -2}, {2, -4}}));
    }
    case ExampleName::F3: {
      // U1 = 0, U2 = 1, Y = 2, X = 3
      auto g = build_graph(2, 2,
                           {{0, 0, {1}},
                            {1, 1, {1}},
                            {1, 0, {1}},
                            {2, 2, {2}},
                            {3, 3, {2}},
                            {2, 3, {5}},
                            {2, 1, {2, 3}},
                            {3, 0, {1, 2}}});
      // Manually specified certificate; delta and anchor are informational.
      auto ex = assemble("F3", std::move(g), {{SeriesId{0}, -3}, {SeriesId{1}, -3}},
                         {{SeriesId{2}, 3}, {SeriesId{3}, 3}}, 3, SeriesId{2}, {2, 3},
                         vertices({{3, -5}, {2, -2}, {2, 3}, {3, 3}, {2, 1}, {3, -2}, {3, 1}}),
                         vertices({{2, -4}, {2, -3}, {2, -2}, {3, -6}, {3, -5}, {3, -4}, {3, -3}}));
      return ex;
    }
  }
  throw SpecError("unknown example");
}

std::optional<SvarParams> draw_stable_params(const LagStructure& g,
                                             std::mt19937_64& rng,
                                             const CoefficientDraw& opt) {
  if (!(opt.lo >= 0.0 && opt.lo <= opt.hi))
    throw SpecError("coefficient range needs 0 <= lo <= hi");
  std::uniform_real_distribution<double> mag(opt.lo, opt.hi);
  std::bernoulli_distribution sign(0.5);
  for (long attempt = 0; attempt < opt.max_retries; ++attempt) {
    SvarParams p = SvarParams::zeros(g);
    for (int t = 0; t < g.dim(); ++t)
      for (const auto& e : g.incoming(SeriesId{t})) {
        const double v = mag(rng);
        p.set(e.lag, SeriesId{t}, e.other, sign(rng) ? v : -v);
      }
    if (spectral_margin(p) <= opt.max_margin) return p;
  }
  return std::nullopt;
}

LagStructure draw_random_graph(const RandomGraphProtocol& pr, std::mt19937_64& rng) {
  const SeriesId U{0}, Y{1}, X{2};
  LagStructure g(1, 2);
  auto add = [&](SeriesId target, SeriesId source, int m, bool self) {
    const int lo = self ? pr.self_lag_lo : pr.cross_lag_lo;
    const int hi = self ? pr.self_lag_hi : pr.cross_lag_hi;
    for (int l : sample_lags(rng, m, lo, hi)) g.add_edge(target, source, l);
  };
  const int m_U = uniform_int(rng, pr.m_lo, pr.m_hi);
  const int m_X = uniform_int(rng, pr.m_lo, pr.m_hi);
  const int m_Y = uniform_int(rng, pr.m_lo, pr.m_hi);
  const int m_XU = uniform_int(rng, pr.m_lo, pr.m_hi);
  const int m_YU = uniform_int(rng, pr.m_lo, pr.m_hi);
  add(U, U, m_U, true);
  add(X, X, m_X, true);
  add(Y, Y, m_Y, true);
  add(X, U, m_XU, false);
  add(Y, U, m_YU, false);
  add(Y, X, pr.m_YX, false);
  add(X, Y, pr.m_XY, false);
  return g;
}

DrawOutcome draw_random_instance(const RandomGraphProtocol& pr, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  DrawOutcome out;
  LagStructure g;
  try {
    g = draw_random_graph(pr, rng);
  } catch (const SpecError& e) {
    out.rejection = std::string("cyclic or invalid graph: ") + e.what();
    return out;
  }
  const std::int64_t span = 3 * (static_cast<std::int64_t>(g.order()) + 1);
  SweepOptions so;
  so.delta_lo = pr.delta_lo.value_or(-span);
  so.delta_hi = pr.delta_hi.value_or(span);
  so.tau_mode = pr.tau_mode;
  const Vertex y{g.observed(0), 0};
  auto results = delta_sweep(g, y, so);
  const auto best = preferred_result(results);
  if (!best) {
    out.rejection = "not identified by the lag-based criteria";
    return out;
  }
  RandomInstance inst;
  inst.seed = seed;
  inst.passing = results.size();
  inst.chosen = results[*best];
  for (int k = 0; k < pr.params_per_graph; ++k) {
    auto p = draw_stable_params(g, rng, pr.coefficients);
    if (!p) {
      out.rejection = "retry budget exhausted while drawing stable parameters";
      return out;
    }
    inst.params.push_back(std::move(*p));
  }
  inst.graph = std::move(g);
  out.instance = std::move(inst);
  return out;
}

std::vector<RandomInstance> accept_instances(const RandomGraphProtocol& pr,
                                             std::size_t n, std::uint64_t master,
                                             std::size_t max_attempts,
                                             AcceptanceLog* log) {
  std::vector<RandomInstance> accepted;
  AcceptanceLog local;
  const std::size_t batch = 64;
  std::size_t next = 0;
  while (accepted.size() < n && next < max_attempts) {
    const std::size_t count = std::min(batch, max_attempts - next);
    std::vector<DrawOutcome> outcomes(count);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i)
      outcomes[static_cast<std::size_t>(i)] =
          draw_random_instance(pr, derive_seed(master, next + static_cast<std::size_t>(i)));
    for (auto& o : outcomes) {
      if (accepted.size() >= n) break;
      ++local.attempts;
      if (o.instance) {
        accepted.push_back(std::move(*o.instance));
      } else if (o.rejection.rfind("retry", 0) == 0) {
        ++local.no_stable_params;
      } else {
        ++local.not_identified;
      }
    }
    next += count;
  }
  if (log) *log = local;
  return accepted;
}

std::string coefficient_label(const LagStructure& g, const CoeffColumn& c) {
  return "A[" + std::to_string(c.lag) + "][" + g.name(c.target) + "][" +
         g.name(c.source) + "]";
}

StudyInstance study_instance(const RandomInstance& inst, std::int64_t id) {
  StudyInstance s;
  s.id = id;
  s.spec = inst.chosen.spec;
  s.params = inst.params;
  const SeriesId Y = inst.graph.observed(0), X = inst.graph.observed(1);
  for (const auto& c : s.spec.coeff_map)
    if (c.target == Y && c.source == X) s.targets.push_back(c);
  if (s.targets.empty()) throw SpecError("spec has no X->Y column");
  return s;
}

StudyInstance example_instance(const WorkedExample& ex, int n_params,
                               std::uint64_t seed, const CoefficientDraw& draw) {
  StudyInstance s;
  s.id = 0;
  s.spec = ex.spec;
  s.targets = ex.spec.coeff_map;
  for (int k = 0; k < n_params; ++k) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
    auto p = draw_stable_params(ex.graph, rng, draw);
    if (!p) throw NumericalError("no stable parameters for " + ex.name);
    s.params.push_back(std::move(*p));
  }
  return s;
}

std::vector<ErrorRow> convergence_study(const std::vector<StudyInstance>& instances,
                                        const std::vector<std::int64_t>& T_grid,
                                        std::uint64_t seed, StudyOptions opt) {
  struct Task {
    std::size_t inst;
    std::size_t T;
    std::size_t draw;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < instances.size(); ++i)
    for (std::size_t t = 0; t < T_grid.size(); ++t)
      for (std::size_t d = 0; d < instances[i].params.size(); ++d)
        tasks.push_back({i, t, d});
  std::vector<std::vector<ErrorRow>> slots(tasks.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(tasks.size()); ++k) {
    const auto& task = tasks[static_cast<std::size_t>(k)];
    const auto& inst = instances[task.inst];
    const auto& params = inst.params[task.draw];
    const std::int64_t T = T_grid[task.T];
    const auto s = derive_seed(
        derive_seed(derive_seed(seed, static_cast<std::uint64_t>(inst.id)), task.draw),
        static_cast<std::uint64_t>(T));
    std::optional<EffectEstimate> est;
    try {
      const Eigen::MatrixXd data = simulate(params, T, opt.burnin, s);
      est = estimate_from_data(data, inst.spec, opt.demean, opt.solve);
    } catch (const NumericalError&) {
    } catch (const SpecError&) {
    }
    auto& rows = slots[static_cast<std::size_t>(k)];
    for (const auto& c : inst.targets) {
      ErrorRow r;
      r.instance = inst.id;
      r.T = T;
      r.param_draw = static_cast<int>(task.draw);
      r.coefficient = coefficient_label(params.graph, c);
      r.truth = params.coef(c.lag, c.target, c.source);
      if (est) {
        r.estimate = est->get(c.lag, c.target, c.source);
        r.abs_error = std::abs(r.estimate - r.truth);
      } else {
        r.failed = true;
        r.estimate = std::numeric_limits<double>::quiet_NaN();
        r.abs_error = std::numeric_limits<double>::quiet_NaN();
      }
      rows.push_back(std::move(r));
    }
  }
  std::vector<ErrorRow> out;
  for (auto& s : slots)
    for (auto& r : s) out.push_back(std::move(r));
  std::stable_sort(out.begin(), out.end(), [](const ErrorRow& a, const ErrorRow& b) {
    return std::tie(a.instance, a.T, a.param_draw) < std::tie(b.instance, b.T, b.param_draw);
  });
  return out;
}

std::vector<MedianRow> median_errors(const std::vector<ErrorRow>& rows) {
  std::map<std::tuple<std::int64_t, std::int64_t, std::string>,
           std::pair<std::vector<double>, std::size_t>>
      groups;
  std::vector<std::tuple<std::int64_t, std::int64_t, std::string>> order;
  for (const auto& r : rows) {
    auto key = std::make_tuple(r.instance, r.T, r.coefficient);
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) order.push_back(key);
    if (r.failed) ++it->second.second;
    else it->second.first.push_back(r.abs_error);
  }
  std::vector<MedianRow> out;
  for (const auto& key : order) {
    const auto& [errs, fails] = groups[key];
    MedianRow m;
    std::tie(m.instance, m.T, m.coefficient) = key;
    m.failures = fails;
    m.median_abs_error = errs.empty() ? std::numeric_limits<double>::quiet_NaN()
                                      : median_of(errs);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace svarid
