#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "svarid/estimate.hpp"
#include "svarid/identify.hpp"
#include "svarid/svar.hpp"

namespace svarid {

enum class ExampleName { Ex3_6, F1, F2, F3 };

ExampleName parse_example(const std::string& name);
std::string example_name(ExampleName e);

struct WorkedExample {
  std::string name;
  LagStructure graph;
  Certificate certificate;
  EstimatorSpec spec;
};

// Hard-coded graphs and estimator specs of the four worked examples. Series
// order is U.., Y = O1, X = O2.
WorkedExample worked_example(ExampleName e);

struct CoefficientDraw {
  double lo = 0.1;
  double hi = 0.9;
  double max_margin = 0.9;
  long max_retries = 100000;
};

// Coefficients ±U(lo, hi) on every edge, Σ = I, rejection-sampled until the
// spectral margin is at most max_margin. Empty when the budget runs out.
std::optional<SvarParams> draw_stable_params(const LagStructure& g,
                                             std::mt19937_64& rng,
                                             const CoefficientDraw& opt = {});

struct RandomGraphProtocol {
  int m_lo = 1;
  int m_hi = 5;
  int m_YX = 1;
  int m_XY = 0;
  int cross_lag_lo = 0;
  int cross_lag_hi = 5;
  int self_lag_lo = 1;
  int self_lag_hi = 5;
  CoefficientDraw coefficients;
  int params_per_graph = 10;
  // Δ range; unset means ±3(p + 1).
  std::optional<std::int64_t> delta_lo;
  std::optional<std::int64_t> delta_hi;
  TauMode tau_mode = TauMode::Default;
};

struct RandomInstance {
  std::uint64_t seed = 0;
  LagStructure graph;
  SweepResult chosen;
  std::size_t passing = 0;
  std::vector<SvarParams> params;
};

struct DrawOutcome {
  std::optional<RandomInstance> instance;
  std::string rejection;
};

// Graph with latent U, Y = O1, X = O2 and lag sets drawn per the protocol.
LagStructure draw_random_graph(const RandomGraphProtocol& protocol,
                               std::mt19937_64& rng);

DrawOutcome draw_random_instance(const RandomGraphProtocol& protocol,
                                 std::uint64_t seed);

struct AcceptanceLog {
  std::size_t attempts = 0;
  std::size_t not_identified = 0;
  std::size_t no_stable_params = 0;
};

// Draws graphs with seeds derive_seed(master, attempt) until n are accepted.
std::vector<RandomInstance> accept_instances(const RandomGraphProtocol& protocol,
                                             std::size_t n, std::uint64_t master,
                                             std::size_t max_attempts,
                                             AcceptanceLog* log = nullptr);

struct StudyInstance {
  std::int64_t id = 0;
  EstimatorSpec spec;
  std::vector<SvarParams> params;
  std::vector<CoeffColumn> targets;
};

struct ErrorRow {
  std::int64_t instance = 0;
  std::int64_t T = 0;
  int param_draw = 0;
  std::string coefficient;
  double truth = 0.0;
  double estimate = 0.0;
  double abs_error = 0.0;
  bool failed = false;
};

struct StudyOptions {
  std::int64_t burnin = 1000;
  bool demean = false;
  SolveOptions solve;
};

// Rows sorted by (instance, T, param_draw, coefficient order).
std::vector<ErrorRow> convergence_study(const std::vector<StudyInstance>& instances,
                                        const std::vector<std::int64_t>& T_grid,
                                        std::uint64_t seed,
                                        StudyOptions opt = {});

struct MedianRow {
  std::int64_t instance = 0;
  std::int64_t T = 0;
  std::string coefficient;
  double median_abs_error = 0.0;
  std::size_t failures = 0;
};

// Median of abs_error over parameter draws, per (instance, T, coefficient).
std::vector<MedianRow> median_errors(const std::vector<ErrorRow>& rows);

std::string coefficient_label(const LagStructure& g, const CoeffColumn& c);

StudyInstance study_instance(const RandomInstance& inst, std::int64_t id);

// Worked example with n_params stable draws as a single study instance.
StudyInstance example_instance(const WorkedExample& ex, int n_params,
                               std::uint64_t seed,
                               const CoefficientDraw& draw = {});

}  // namespace svarid
