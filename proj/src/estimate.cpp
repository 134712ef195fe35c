#include "svarid/estimate.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include "svarid/autocov.hpp"
#include "svarid/error.hpp"
#include "svarid/rng.hpp"

namespace svarid {

std::string TableProvider::describe() const {
  if (table_.exact()) return "exact";
  return "sample(T=" + std::to_string(table_.sample_size()) + ")";
}

LinearSystem build_system(const CovarianceProvider& provider,
                          const EstimatorSpec& spec) {
  if (spec.R.empty() || spec.C.empty()) throw SpecError("empty R or C");
  if (spec.max_lag_span() > provider.max_lag())
    throw SpecError("covariance provider covers lags up to " +
                    std::to_string(provider.max_lag()) + " but the spec needs " +
                    std::to_string(spec.max_lag_span()));
  LinearSystem sys;
  const auto n = static_cast<Eigen::Index>(spec.R.size());
  const auto m = static_cast<Eigen::Index>(spec.C.size());
  sys.matrix.resize(n, m);
  sys.rhs.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = spec.R[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m; ++j)
      sys.matrix(i, j) = provider.cov(r, spec.C[static_cast<std::size_t>(j)]);
    sys.rhs(i) = provider.cov(r, spec.y);
  }
  sys.spec = spec;
  sys.provenance = provider.describe();
  return sys;
}

double EffectEstimate::get(int lag, SeriesId target, SeriesId source) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i].lag == lag && columns[i].target == target &&
        columns[i].source == source)
      return coefficients[i];
  throw SpecError("effect not estimated by this spec");
}

double condition_number(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return std::numeric_limits<double>::infinity();
  const double lo = s(s.size() - 1);
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return s(0) / lo;
}

EffectEstimate solve_effects(const LinearSystem& system, SolveOptions opt) {
  const auto& M = system.matrix;
  if (M.rows() != M.cols())
    throw SpecError("system is " + std::to_string(M.rows()) + "x" +
                    std::to_string(M.cols()) + ", not square");
  if (!M.allFinite() || !system.rhs.allFinite())
    throw NumericalError("non-finite covariance entries");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double lo = s(s.size() - 1);
  const double cond = lo > 0.0 ? s(0) / lo : std::numeric_limits<double>::infinity();
  if (!(cond <= opt.max_condition)) {
    std::ostringstream os;
    os << "numerically singular - genericity or spec violated (condition number "
       << cond << ")";
    throw NumericalError(os.str());
  }
  EffectEstimate est;
  est.full_solution = svd.solve(system.rhs);
  est.condition = cond;
  est.columns = system.spec.coeff_map;
  for (const auto& c : est.columns)
    est.coefficients.push_back(est.full_solution(c.column));
  est.provenance = system.provenance;
  return est;
}

EffectEstimate estimate_from_data(const Eigen::MatrixXd& data,
                                  const EstimatorSpec& spec, bool demean,
                                  SolveOptions opt) {
  const auto span = spec.max_lag_span();
  if (span >= data.cols())
    throw SpecError("series of length " + std::to_string(data.cols()) +
                    " is too short for lag span " + std::to_string(span));
  TableProvider p(sample_autocov_table(data, static_cast<int>(span), demean));
  return solve_effects(build_system(p, spec), opt);
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

Eigen::MatrixXd block_resample(const Eigen::MatrixXd& data,
                               std::int64_t block_len, std::uint64_t seed) {
  const std::int64_t T = data.cols();
  if (block_len < 1 || block_len > T)
    throw SpecError("block length must lie in [1, T]");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> start(0, T - block_len);
  Eigen::MatrixXd out(data.rows(), T);
  std::int64_t filled = 0;
  while (filled < T) {
    const auto s = start(rng);
    const auto n = std::min(block_len, T - filled);
    out.middleCols(filled, n) = data.middleCols(s, n);
    filled += n;
  }
  return out;
}

BootstrapSummary block_bootstrap(const Eigen::MatrixXd& data,
                                 const EstimatorSpec& spec,
                                 std::int64_t block_len, int replicates,
                                 std::uint64_t seed, bool demean,
                                 SolveOptions opt) {
  if (replicates < 1) throw SpecError("need at least one replicate");
  if (block_len < 1 || block_len > data.cols())
    throw SpecError("block length must lie in [1, T]");
  BootstrapSummary out;
  out.point = estimate_from_data(data, spec, demean, opt);
  std::vector<std::optional<std::vector<double>>> slot(static_cast<std::size_t>(replicates));
#pragma omp parallel for schedule(dynamic)
  for (int b = 0; b < replicates; ++b) {
    try {
      auto resampled = block_resample(data, block_len,
                                      derive_seed(seed, static_cast<std::uint64_t>(b)));
      slot[static_cast<std::size_t>(b)] =
          estimate_from_data(resampled, spec, demean, opt).coefficients;
    } catch (const std::exception&) {
    }
  }
  for (std::size_t b = 0; b < slot.size(); ++b) {
    if (!slot[b]) {
      ++out.failures;
      continue;
    }
    out.replicates.push_back(*slot[b]);
    out.replicate_index.push_back(b);
  }
  const std::size_t k = out.point.columns.size();
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> v;
    for (const auto& r : out.replicates) v.push_back(r[c]);
    out.q025.push_back(quantile(v, 0.025));
    out.median.push_back(quantile(v, 0.5));
    out.q975.push_back(quantile(v, 0.975));
  }
  return out;
}

}  // namespace svarid
