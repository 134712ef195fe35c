#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "svarid/graph.hpp"

namespace svarid {

struct SvarParams {
  LagStructure graph;
  std::vector<Eigen::MatrixXd> coeffs;  // A^(0) .. A^(p)
  Eigen::VectorXd noise_var;

  // Zero coefficients on every declared edge and unit noise variances.
  static SvarParams zeros(const LagStructure& g);

  int dim() const { return graph.dim(); }
  int order() const { return graph.order(); }
  // Zero when the lag is out of range or the edge is not declared.
  double coef(int lag, SeriesId target, SeriesId source) const;
  void set(int lag, SeriesId target, SeriesId source, double value);
  // Checks shapes, support and nonnegative variances.
  void validate() const;
};

struct CompanionForm {
  Eigen::MatrixXd B0;                  // (I - A^(0))^{-1}
  std::vector<Eigen::MatrixXd> reduced;  // B^(1) .. B^(p), index h - 1
  Eigen::MatrixXd big_B;
};

CompanionForm companion(const SvarParams& params);
double spectral_margin(const SvarParams& params);

// Γ(h) = E[S_t S_{t-h}^T].
class CovarianceTable {
 public:
  CovarianceTable() = default;
  CovarianceTable(std::vector<Eigen::MatrixXd> gamma, bool exact,
                  std::int64_t sample_size = 0);

  int h_max() const { return static_cast<int>(gamma_.size()) - 1; }
  int dim() const { return gamma_.empty() ? 0 : static_cast<int>(gamma_[0].rows()); }
  bool exact() const { return exact_; }
  std::int64_t sample_size() const { return sample_size_; }

  Eigen::MatrixXd at(std::int64_t h) const;
  // E[a b] for two vertices of the full time graph.
  double cov(const Vertex& a, const Vertex& b) const;
  CovarianceTable scaled(double c) const;

 private:
  std::vector<Eigen::MatrixXd> gamma_;
  bool exact_ = true;
  std::int64_t sample_size_ = 0;
};

// Draws one standardized (zero mean, unit variance) noise value.
using NoiseSampler = std::function<double(std::mt19937_64&)>;

// Returns a dim x T matrix whose column t is S_t.
Eigen::MatrixXd simulate(const SvarParams& params, std::int64_t T,
                         std::int64_t burnin, std::uint64_t seed,
                         const NoiseSampler& noise = {});

struct LyapunovOptions {
  int direct_max_dim = 40;
  int max_doublings = 200;
};

CovarianceTable exact_autocov(const SvarParams& params, int h_max,
                              LyapunovOptions opt = {});

}  // namespace svarid
