#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "svarid/svar.hpp"

namespace svarid {

// Γ̂(h) = 1/(T-h) Σ_{j=h}^{T-1} S_j S_{j-h}^T for a dim x T data matrix.
// The parallel kernels sum fixed-size chunks and combine them in chunk order,
// so results do not depend on the thread count.
Eigen::MatrixXd sample_autocov(const Eigen::MatrixXd& data, std::int64_t h,
                               bool demean);
Eigen::MatrixXd sample_autocov_serial(const Eigen::MatrixXd& data,
                                      std::int64_t h, bool demean);

// All lags 0..h_max in one pass over the data.
CovarianceTable sample_autocov_table(const Eigen::MatrixXd& data, int h_max,
                                     bool demean);
CovarianceTable sample_autocov_table_serial(const Eigen::MatrixXd& data,
                                            int h_max, bool demean);

constexpr std::int64_t kAutocovChunk = 8192;

}  // namespace svarid
