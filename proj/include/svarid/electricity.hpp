#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "svarid/estimate.hpp"
#include "svarid/identify.hpp"
#include "svarid/svar.hpp"

namespace svarid {

enum class ElectricityVariant { Model1 = 1, Model2 = 2, Model3 = 3 };

ElectricityVariant parse_variant(const std::string& s);

struct ElectricityModel {
  ElectricityVariant variant = ElectricityVariant::Model1;
  double beta_P = -100.0;
  double beta_P1 = 50.0;
  double beta_D1 = 0.7;
  double beta_B1 = 0.9;
  double gamma_P = 500.0;
  double gamma_W = 1.0;
  double S0 = 25000.0;
  double D0 = 50000.0;
  double B0 = 0.0;
  // Noise variances.
  double var_UD = 2000.0;
  double var_US = 1.0;
  double var_UA = 1414.2135623730951;
  double var_UB = 1414.2135623730951;
  std::vector<double> wind_ar{0.5, 0.15, 0.0, 0.05};
  double wind_var = 1e7;

  // Defaults for the variant. Model 3 drops the lagged-demand term.
  static ElectricityModel defaults(ElectricityVariant v);
  void validate() const;
};

// Series layout. Models 1 and 3: U1 = W, U2 = U^D. Model 2: U1 = W, U2 = U^A,
// U3 = U^B, U4 = B. In all models O1 = D (the target) and O2 = P.
LagStructure electricity_graph(const ElectricityModel& m);
SvarParams electricity_svar(const ElectricityModel& m);

// Simulates the model equations with intercepts. Rows follow the series
// layout above.
Eigen::MatrixXd simulate_electricity(const ElectricityModel& m, std::int64_t T,
                                     std::int64_t burnin, std::uint64_t seed);

constexpr int kEstimatorRows = 5;

// Estimator of one bank row, with D_t as target and the P_t column as the
// only reported coefficient.
EstimatorSpec estimator_row_spec(const ElectricityModel& m, int row);

// Whether the row is marked valid for the variant.
bool estimator_row_valid(int row, ElectricityVariant v);

// Estimate of beta_P from exact covariances of the linear part.
double electricity_population_estimate(const ElectricityModel& m, int row);

struct ElectricityReport {
  std::vector<double> estimates;  // successful repetitions, in order
  std::size_t failures = 0;
  double q025 = 0.0;
  double median = 0.0;
  double q975 = 0.0;
};

ElectricityReport electricity_semisynth(const ElectricityModel& m, int row,
                                        std::int64_t T, int repetitions,
                                        std::uint64_t seed,
                                        std::int64_t burnin = 1000);

}  // namespace svarid
