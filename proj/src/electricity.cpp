#include "svarid/electricity.hpp"

#include <cmath>
#include <random>

#include "svarid/error.hpp"
#include "svarid/rng.hpp"

namespace svarid {

namespace {

bool two_latents(const ElectricityModel& m) {
  return m.variant != ElectricityVariant::Model2;
}

struct Layout {
  SeriesId W, UD, UA, UB, B, D, P;
};

Layout layout(const ElectricityModel& m) {
  Layout l{};
  l.W = SeriesId{0};
  if (two_latents(m)) {
    l.UD = SeriesId{1};
    l.D = SeriesId{2};
    l.P = SeriesId{3};
  } else {
    l.UA = SeriesId{1};
    l.UB = SeriesId{2};
    l.B = SeriesId{3};
    l.D = SeriesId{4};
    l.P = SeriesId{5};
  }
  return l;
}

}  // namespace

ElectricityVariant parse_variant(const std::string& s) {
  if (s == "1" || s == "Model1" || s == "model1") return ElectricityVariant::Model1;
  if (s == "2" || s == "Model2" || s == "model2") return ElectricityVariant::Model2;
  if (s == "3" || s == "Model3" || s == "model3") return ElectricityVariant::Model3;
  throw SpecError("unknown electricity model '" + s + "'");
}

ElectricityModel ElectricityModel::defaults(ElectricityVariant v) {
  ElectricityModel m;
  m.variant = v;
  if (v == ElectricityVariant::Model3) m.beta_D1 = 0.0;
  return m;
}

void ElectricityModel::validate() const {
  if (beta_P - gamma_P == 0.0) throw SpecError("beta_P - gamma_P must be nonzero");
  for (double s : {var_UD, var_US, var_UA, var_UB, wind_var})
    if (!(s >= 0.0)) throw SpecError("noise scales must be nonnegative");
  if (wind_ar.empty()) throw SpecError("wind process needs at least one AR coefficient");
}

LagStructure electricity_graph(const ElectricityModel& m) {
  m.validate();
  const auto l = layout(m);
  LagStructure g(two_latents(m) ? 2 : 4, 2);
  for (std::size_t i = 0; i < m.wind_ar.size(); ++i)
    if (m.wind_ar[i] != 0.0) g.add_edge(l.W, l.W, static_cast<int>(i) + 1);
  g.add_edge(l.P, l.W, 0);
  g.add_edge(l.D, l.P, 0);
  switch (m.variant) {
    case ElectricityVariant::Model1:
      g.add_edge(l.D, l.UD, 0);
      g.add_edge(l.P, l.UD, 0);
      if (m.beta_D1 != 0.0) {
        g.add_edge(l.D, l.D, 1);
        g.add_edge(l.P, l.D, 1);
      }
      break;
    case ElectricityVariant::Model2:
      g.add_edge(l.B, l.B, 1);
      g.add_edge(l.B, l.UB, 0);
      for (auto u : {l.UA, l.UB}) {
        g.add_edge(l.D, u, 0);
        g.add_edge(l.P, u, 0);
      }
      g.add_edge(l.D, l.B, 1);
      g.add_edge(l.P, l.B, 1);
      break;
    case ElectricityVariant::Model3:
      g.add_edge(l.D, l.UD, 0);
      g.add_edge(l.P, l.UD, 0);
      g.add_edge(l.D, l.P, 1);
      g.add_edge(l.P, l.P, 1);
      if (m.beta_D1 != 0.0) g.add_edge(l.D, l.D, 1);
      break;
  }
  return g;
}

SvarParams electricity_svar(const ElectricityModel& m) {
  const auto g = electricity_graph(m);
  const auto l = layout(m);
  const double den = m.beta_P - m.gamma_P;
  SvarParams p = SvarParams::zeros(g);
  p.noise_var.setZero();
  for (std::size_t i = 0; i < m.wind_ar.size(); ++i)
    if (m.wind_ar[i] != 0.0) p.set(static_cast<int>(i) + 1, l.W, l.W, m.wind_ar[i]);
  p.noise_var(l.W.index) = m.wind_var;
  p.set(0, l.P, l.W, m.gamma_W / den);
  p.set(0, l.D, l.P, m.beta_P);
  p.noise_var(l.P.index) = m.var_US / (den * den);
  switch (m.variant) {
    case ElectricityVariant::Model1:
      p.noise_var(l.UD.index) = m.var_UD;
      p.set(0, l.D, l.UD, 1.0);
      p.set(0, l.P, l.UD, -1.0 / den);
      if (m.beta_D1 != 0.0) {
        p.set(1, l.D, l.D, m.beta_D1);
        p.set(1, l.P, l.D, -m.beta_D1 / den);
      }
      break;
    case ElectricityVariant::Model2:
      p.noise_var(l.UA.index) = m.var_UA;
      p.noise_var(l.UB.index) = m.var_UB;
      p.set(1, l.B, l.B, m.beta_B1);
      p.set(0, l.B, l.UB, 1.0);
      for (auto u : {l.UA, l.UB}) {
        p.set(0, l.D, u, 1.0);
        p.set(0, l.P, u, -1.0 / den);
      }
      p.set(1, l.D, l.B, m.beta_B1);
      p.set(1, l.P, l.B, m.beta_B1 / den);
      break;
    case ElectricityVariant::Model3:
      p.noise_var(l.UD.index) = m.var_UD;
      p.set(0, l.D, l.UD, 1.0);
      p.set(0, l.P, l.UD, -1.0 / den);
      p.set(1, l.D, l.P, m.beta_P1);
      p.set(1, l.P, l.P, -m.beta_P1 / den);
      if (m.beta_D1 != 0.0) p.set(1, l.D, l.D, m.beta_D1);
      break;
  }
  return p;
}

Eigen::MatrixXd simulate_electricity(const ElectricityModel& m, std::int64_t T,
                                     std::int64_t burnin, std::uint64_t seed) {
  m.validate();
  if (T <= 0 || burnin < 0) throw SpecError("T must be positive and burnin nonnegative");
  const auto l = layout(m);
  const int d = two_latents(m) ? 4 : 6;
  const std::int64_t n = T + burnin;
  const double den = m.beta_P - m.gamma_P;
  const double c = (m.S0 - m.D0) / den;
  const auto q = static_cast<std::int64_t>(m.wind_ar.size());
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(d, n);
  const double sd_W = std::sqrt(m.wind_var), sd_US = std::sqrt(m.var_US);
  const double sd_UD = std::sqrt(m.var_UD), sd_UA = std::sqrt(m.var_UA);
  const double sd_UB = std::sqrt(m.var_UB);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  auto past = [&](SeriesId s, std::int64_t t) { return t >= 0 ? S(s.index, t) : 0.0; };
  for (std::int64_t t = 0; t < n; ++t) {
    double w = sd_W * z(rng);
    for (std::int64_t i = 0; i < q; ++i)
      w += m.wind_ar[static_cast<std::size_t>(i)] * past(l.W, t - i - 1);
    S(l.W.index, t) = w;
    const double us = sd_US * z(rng);
    switch (m.variant) {
      case ElectricityVariant::Model1: {
        const double ud = sd_UD * z(rng);
        const double dl = past(l.D, t - 1);
        const double p = c + m.gamma_W / den * w - m.beta_D1 / den * dl + (us - ud) / den;
        S(l.UD.index, t) = ud;
        S(l.P.index, t) = p;
        S(l.D.index, t) = m.D0 + m.beta_P * p + m.beta_D1 * dl + ud;
        break;
      }
      case ElectricityVariant::Model2: {
        const double ua = sd_UA * z(rng);
        const double ub = sd_UB * z(rng);
        const double bl = past(l.B, t - 1);
        const double p = c + m.gamma_W / den * w + m.beta_B1 / den * bl + (us - ua - ub) / den;
        S(l.UA.index, t) = ua;
        S(l.UB.index, t) = ub;
        S(l.B.index, t) = m.B0 + m.beta_B1 * bl + ub;
        S(l.P.index, t) = p;
        S(l.D.index, t) = m.D0 + m.beta_P * p + m.beta_B1 * bl + ua + ub;
        break;
      }
      case ElectricityVariant::Model3: {
        const double ud = sd_UD * z(rng);
        const double pl = past(l.P, t - 1);
        const double p = c + m.gamma_W / den * w - m.beta_P1 / den * pl + (us - ud) / den;
        S(l.UD.index, t) = ud;
        S(l.P.index, t) = p;
        S(l.D.index, t) =
            m.D0 + m.beta_P * p + m.beta_P1 * pl + m.beta_D1 * past(l.D, t - 1) + ud;
        break;
      }
    }
  }
  return S.rightCols(T);
}

EstimatorSpec estimator_row_spec(const ElectricityModel& m, int row) {
  const auto l = layout(m);
  auto P = [&](std::int64_t t) { return Vertex{l.P, t}; };
  auto D = [&](std::int64_t t) { return Vertex{l.D, t}; };
  EstimatorSpec s;
  s.y = D(0);
  switch (row) {
    case 1:
      s.R = {P(-1), P(-2)};
      s.C = {P(0), D(-1)};
      break;
    case 2:
      s.R = {P(-1), P(-2)};
      s.C = {P(-1), P(0)};
      break;
    case 3:
      s.R = {P(-1), P(-2), P(-3)};
      s.C = {P(-1), P(0), D(-1)};
      break;
    case 4:
      s.R = {P(-1), P(-3), P(-4)};
      s.C = {P(0), D(1), P(1)};
      break;
    case 5:
      s.R = {P(-1), P(-2), P(-3), P(-4), P(-5)};
      s.C = {P(-1), D(-1), P(0), D(2), P(2)};
      break;
    default:
      throw SpecError("estimator rows are numbered 1.." + std::to_string(kEstimatorRows));
  }
  for (std::size_t i = 0; i < s.C.size(); ++i)
    if (s.C[i] == P(0)) s.coeff_map.push_back({static_cast<int>(i), 0, l.D, l.P, false});
  s.provenance = "estimator row " + std::to_string(row);
  return s;
}

bool estimator_row_valid(int row, ElectricityVariant v) {
  const int k = static_cast<int>(v);
  switch (row) {
    case 1: return k == 1;
    case 2: return k == 3;
    case 3: return k == 1 || k == 3;
    case 4: return k == 2;
    case 5: return true;
    default: throw SpecError("estimator rows are numbered 1.." + std::to_string(kEstimatorRows));
  }
}

double electricity_population_estimate(const ElectricityModel& m, int row) {
  const auto spec = estimator_row_spec(m, row);
  const auto params = electricity_svar(m);
  TableProvider prov(exact_autocov(params, static_cast<int>(spec.max_lag_span())));
  const auto est = solve_effects(build_system(prov, spec));
  return est.coefficients.at(0);
}

ElectricityReport electricity_semisynth(const ElectricityModel& m, int row,
                                        std::int64_t T, int repetitions,
                                        std::uint64_t seed, std::int64_t burnin) {
  if (repetitions <= 0) throw SpecError("repetitions must be positive");
  const auto spec = estimator_row_spec(m, row);
  std::vector<double> est(static_cast<std::size_t>(repetitions));
  std::vector<char> ok(static_cast<std::size_t>(repetitions), 0);
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < repetitions; ++r) {
    try {
      const auto data = simulate_electricity(m, T, burnin,
                                             derive_seed(seed, static_cast<std::uint64_t>(r)));
      est[static_cast<std::size_t>(r)] = estimate_from_data(data, spec, true).coefficients.at(0);
      ok[static_cast<std::size_t>(r)] = 1;
    } catch (const NumericalError&) {
    }
  }
  ElectricityReport rep;
  for (int r = 0; r < repetitions; ++r) {
    if (ok[static_cast<std::size_t>(r)]) rep.estimates.push_back(est[static_cast<std::size_t>(r)]);
    else ++rep.failures;
  }
  if (!rep.estimates.empty()) {
    rep.q025 = quantile(rep.estimates, 0.025);
    rep.median = quantile(rep.estimates, 0.5);
    rep.q975 = quantile(rep.estimates, 0.975);
  }
  return rep;
}

}  // namespace svarid
