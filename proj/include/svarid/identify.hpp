#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "svarid/graph.hpp"

namespace svarid {

struct Check {
  std::string name;
  bool pass = false;
  std::string witness;
};

bool all_pass(const std::vector<Check>& checks);
const Check* find_check(const std::vector<Check>& checks, const std::string& name);

// One solution component that is a direct effect A^(lag)_{target,source}.
// superset marks a declared extra parent whose true coefficient is zero.
struct CoeffColumn {
  int column = 0;
  int lag = 0;
  SeriesId target;
  SeriesId source;
  bool superset = false;
};

struct EstimatorSpec {
  Vertex y;
  std::vector<Vertex> R;
  std::vector<Vertex> C;
  std::vector<CoeffColumn> coeff_map;
  std::string provenance;

  // max |t(a) - t(b)| over a in R, b in C ∪ {y}.
  std::int64_t max_lag_span() const;
};

struct Certificate {
  VertexSet B_U;
  VertexSet F_obs;
  std::int64_t delta = 0;
  SeriesId anchor;
  // Per observed series, indexed by observed position. Filled by
  // assign_taus; entries may be overridden by hand.
  std::vector<std::int64_t> tau;
  std::vector<Check> checks;
};

// pa^obs(y) in time order, then F, then the remaining pa^obs(F).
std::vector<Vertex> build_c(const LagStructure& g, const Vertex& y,
                            const VertexSet& F_obs,
                            const VertexSet& extra_y_parents = {});

// Columns of C that are observed parents of y, or declared extra parents.
std::vector<CoeffColumn> make_coeff_map(const LagStructure& g, const Vertex& y,
                                        const std::vector<Vertex>& C,
                                        const VertexSet& extra_y_parents = {});

void assign_taus(const LagStructure& g, const Vertex& y, Certificate& cert,
                 TauMode mode = TauMode::Default, SearchLimits lim = {});

std::pair<VertexSet, VertexSet> construct_bu_fobs(const LagStructure& g,
                                                  SeriesId i0,
                                                  std::int64_t delta,
                                                  const Vertex& y);

struct PathSystem {
  std::vector<std::vector<Vertex>> paths;
  int sign = 1;
};

struct UpsilonResult {
  bool unique = false;
  std::size_t systems = 0;
  PathSystem witness;
};

struct UpsilonOptions {
  std::size_t max_systems = 1000000;
};

UpsilonResult check_upsilon_uniqueness(const LagStructure& g,
                                       const VertexSet& B_U,
                                       const VertexSet& F_obs,
                                       UpsilonOptions opt = {});

struct CheckOptions {
  bool check_upsilon = true;
  SearchLimits limits;
  UpsilonOptions upsilon;
};

// Conditions 1, 2a, 2b, 2c, 3 and 4 plus |R| = |C|. Condition 5 is covered
// by the lag-based checks below.
std::vector<Check> check_identification_conditions(
    const LagStructure& g,
    const Vertex& y,
    const VertexSet& B_U,
    const VertexSet& F_obs,
    const std::vector<Vertex>& R,
    const std::vector<Vertex>& C,
    CheckOptions opt = {});

struct RPartition {
  VertexSet R1;
  VertexSet R2;
};

struct SeriesWitness {
  SeriesId series;
  std::int64_t tau = 0;
  std::vector<Vertex> C1;
  std::vector<Vertex> C2;
  std::optional<int> self_lag;      // l^{O^i}_{j_i}
  std::optional<LagEdge> latent_edge;  // U^{k_i} -> O^i at lag w_i
};

struct CReport {
  std::vector<Check> checks;
  std::vector<SeriesWitness> series;  // observed series in order
  std::map<int, int> latent_lag;      // latent index -> l^{U^k}_{j_k}
  VertexSet P;
  VertexSet Q;

  bool passed() const { return all_pass(checks); }
};

CReport check_conditions_c(const LagStructure& g, const Vertex& y,
                           const Certificate& cert,
                           const std::optional<RPartition>& partition = {});

// Builds R from a certificate whose partition-free checks pass. The final
// report with the partition filled in is written to report when given.
EstimatorSpec construct_r(const LagStructure& g, const Vertex& y,
                          const Certificate& cert, SearchLimits lim = {},
                          CReport* report = nullptr,
                          RPartition* partition = nullptr);

struct SweepOptions {
  std::int64_t delta_lo = -10;
  std::int64_t delta_hi = 10;
  TauMode tau_mode = TauMode::Default;
  SearchLimits limits;
};

struct SweepResult {
  Certificate certificate;
  EstimatorSpec spec;
};

std::vector<SweepResult> delta_sweep(const LagStructure& g, const Vertex& y,
                                     SweepOptions opt = {});

// Index of the result minimizing max_lag_span; ties go to smaller |Δ|, then
// smaller Δ, then lower anchor.
std::optional<std::size_t> preferred_result(const std::vector<SweepResult>& rs);

}  // namespace svarid
