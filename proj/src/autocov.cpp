#include "svarid/autocov.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "svarid/error.hpp"

namespace svarid {

namespace {

void check_lag(const Eigen::MatrixXd& data, std::int64_t h) {
  if (h < 0) throw SpecError("negative autocovariance lag");
  if (h >= data.cols())
    throw SpecError("lag " + std::to_string(h) + " needs more than " +
                    std::to_string(data.cols()) + " samples");
}

Eigen::MatrixXd centered(const Eigen::MatrixXd& data, bool demean) {
  if (!demean) return data;
  Eigen::VectorXd mean = data.rowwise().mean();
  return data.colwise() - mean;
}

// Adds Σ_{j in [lo, hi)} S_j S_{j-h}^T into acc.
void accumulate(const Eigen::MatrixXd& X, std::int64_t h, std::int64_t lo,
                std::int64_t hi, Eigen::MatrixXd& acc) {
  const Eigen::Index d = X.rows();
  for (std::int64_t j = lo; j < hi; ++j)
    for (Eigen::Index b = 0; b < d; ++b) {
      const double y = X(b, j - h);
      for (Eigen::Index a = 0; a < d; ++a) acc(a, b) += X(a, j) * y;
    }
}

}  // namespace

Eigen::MatrixXd sample_autocov_serial(const Eigen::MatrixXd& data,
                                      std::int64_t h, bool demean) {
  check_lag(data, h);
  Eigen::MatrixXd X = centered(data, demean);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(X.rows(), X.rows());
  accumulate(X, h, h, X.cols(), acc);
  return acc / static_cast<double>(X.cols() - h);
}

Eigen::MatrixXd sample_autocov(const Eigen::MatrixXd& data, std::int64_t h,
                               bool demean) {
  check_lag(data, h);
  Eigen::MatrixXd X = centered(data, demean);
  const std::int64_t T = X.cols();
  const std::int64_t n = T - h;
  const std::int64_t chunks = (n + kAutocovChunk - 1) / kAutocovChunk;
  std::vector<Eigen::MatrixXd> part(static_cast<std::size_t>(chunks),
                                    Eigen::MatrixXd::Zero(X.rows(), X.rows()));
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::int64_t lo = h + c * kAutocovChunk;
    const std::int64_t hi = std::min(T, lo + kAutocovChunk);
    accumulate(X, h, lo, hi, part[static_cast<std::size_t>(c)]);
  }
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(X.rows(), X.rows());
  for (const auto& m : part) acc += m;
  return acc / static_cast<double>(n);
}

CovarianceTable sample_autocov_table_serial(const Eigen::MatrixXd& data,
                                            int h_max, bool demean) {
  check_lag(data, h_max);
  std::vector<Eigen::MatrixXd> g;
  for (int h = 0; h <= h_max; ++h) g.push_back(sample_autocov_serial(data, h, demean));
  return CovarianceTable(std::move(g), false, data.cols());
}

CovarianceTable sample_autocov_table(const Eigen::MatrixXd& data, int h_max,
                                     bool demean) {
  check_lag(data, h_max);
  Eigen::MatrixXd X = centered(data, demean);
  const std::int64_t T = X.cols();
  const Eigen::Index d = X.rows();
  const std::int64_t chunks = (T + kAutocovChunk - 1) / kAutocovChunk;
  const std::size_t H = static_cast<std::size_t>(h_max) + 1;
  std::vector<Eigen::MatrixXd> part(static_cast<std::size_t>(chunks) * H,
                                    Eigen::MatrixXd::Zero(d, d));
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::int64_t lo = c * kAutocovChunk;
    const std::int64_t hi = std::min(T, lo + kAutocovChunk);
    for (int h = 0; h <= h_max; ++h)
      accumulate(X, h, std::max<std::int64_t>(lo, h), hi,
                 part[static_cast<std::size_t>(c) * H + static_cast<std::size_t>(h)]);
  }
  std::vector<Eigen::MatrixXd> g(H, Eigen::MatrixXd::Zero(d, d));
  for (std::int64_t c = 0; c < chunks; ++c)
    for (std::size_t h = 0; h < H; ++h) g[h] += part[static_cast<std::size_t>(c) * H + h];
  for (std::size_t h = 0; h < H; ++h) g[h] /= static_cast<double>(T - static_cast<std::int64_t>(h));
  return CovarianceTable(std::move(g), false, T);
}

}  // namespace svarid
