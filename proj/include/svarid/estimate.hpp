#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "svarid/identify.hpp"
#include "svarid/svar.hpp"

namespace svarid {

class CovarianceProvider {
 public:
  virtual ~CovarianceProvider() = default;
  virtual double cov(const Vertex& a, const Vertex& b) const = 0;
  virtual int max_lag() const = 0;
  virtual std::string describe() const = 0;
};

class TableProvider : public CovarianceProvider {
 public:
  explicit TableProvider(CovarianceTable table) : table_(std::move(table)) {}
  double cov(const Vertex& a, const Vertex& b) const override { return table_.cov(a, b); }
  int max_lag() const override { return table_.h_max(); }
  std::string describe() const override;
  const CovarianceTable& table() const { return table_; }

 private:
  CovarianceTable table_;
};

struct LinearSystem {
  Eigen::MatrixXd matrix;  // Γ_{R,C}
  Eigen::VectorXd rhs;     // Γ_{R,y}
  EstimatorSpec spec;
  std::string provenance;
};

LinearSystem build_system(const CovarianceProvider& provider,
                          const EstimatorSpec& spec);

struct EffectEstimate {
  std::vector<CoeffColumn> columns;
  std::vector<double> coefficients;  // aligned with columns
  Eigen::VectorXd full_solution;
  double condition = 0.0;
  std::string provenance;

  // Throws when the effect is not among the columns.
  double get(int lag, SeriesId target, SeriesId source) const;
};

struct SolveOptions {
  double max_condition = 1e12;
};

double condition_number(const Eigen::MatrixXd& m);

EffectEstimate solve_effects(const LinearSystem& system, SolveOptions opt = {});

EffectEstimate estimate_from_data(const Eigen::MatrixXd& data,
                                  const EstimatorSpec& spec, bool demean,
                                  SolveOptions opt = {});

// Linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);

struct BootstrapSummary {
  EffectEstimate point;
  std::vector<std::vector<double>> replicates;  // successful ones, in index order
  std::vector<std::size_t> replicate_index;
  std::size_t failures = 0;
  std::vector<double> q025;
  std::vector<double> median;
  std::vector<double> q975;
};

// Moving-block resample: ceil(T / block_len) blocks with starts drawn
// uniformly from [0, T - block_len], concatenated and cut to T columns.
Eigen::MatrixXd block_resample(const Eigen::MatrixXd& data,
                               std::int64_t block_len, std::uint64_t seed);

BootstrapSummary block_bootstrap(const Eigen::MatrixXd& data,
                                 const EstimatorSpec& spec,
                                 std::int64_t block_len, int replicates,
                                 std::uint64_t seed, bool demean,
                                 SolveOptions opt = {});

}  // namespace svarid
