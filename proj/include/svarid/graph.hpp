#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace svarid {

enum class SeriesKind { Latent, Observed };

// Position of a component in S_t. Latent series come first.
struct SeriesId {
  int index = 0;
  auto operator<=>(const SeriesId&) const = default;
};

struct Vertex {
  SeriesId series;
  std::int64_t time = 0;

  bool operator==(const Vertex&) const = default;
  std::strong_ordering operator<=>(const Vertex& o) const {
    if (auto c = time <=> o.time; c != 0) return c;
    return series <=> o.series;
  }
  Vertex shifted(std::int64_t s) const { return {series, time + s}; }
};

using VertexSet = std::set<Vertex>;

std::int64_t t_inf(const VertexSet& s);
std::int64_t t_sup(const VertexSet& s);
VertexSet shifted(const VertexSet& s, std::int64_t by);
VertexSet set_union(const VertexSet& a, const VertexSet& b);
VertexSet set_intersection(const VertexSet& a, const VertexSet& b);
VertexSet set_difference(const VertexSet& a, const VertexSet& b);

struct LagEdge {
  SeriesId other;
  int lag = 0;
};

// Finite description of the full time graph: for each ordered pair
// (target, source) the set of lags h with S^source_{t-h} -> S^target_t.
class LagStructure {
 public:
  LagStructure() = default;
  LagStructure(int d_latent, int d_observed);

  void add_edge(SeriesId target, SeriesId source, int lag);

  int d_latent() const { return d_latent_; }
  int d_observed() const { return d_observed_; }
  int dim() const { return d_latent_ + d_observed_; }
  int order() const { return order_; }

  bool is_latent(SeriesId s) const { return s.index < d_latent_; }
  SeriesKind kind(SeriesId s) const {
    return is_latent(s) ? SeriesKind::Latent : SeriesKind::Observed;
  }
  SeriesId latent(int k) const;    // 0-based among latents
  SeriesId observed(int k) const;  // 0-based among observed; observed(0) is Y
  void check(SeriesId s) const;

  std::string name(SeriesId s) const;
  SeriesId parse(const std::string& name) const;
  std::string name(const Vertex& v) const;

  const std::vector<int>& lags(SeriesId target, SeriesId source) const;
  const std::vector<int>& self_lags(SeriesId s) const { return lags(s, s); }
  // Incoming edges of a series sorted by (lag, source).
  const std::vector<LagEdge>& incoming(SeriesId target) const;
  // Outgoing edges of a series sorted by (lag, target).
  const std::vector<LagEdge>& outgoing(SeriesId source) const;
  // Topological order of the lag-0 edge relation.
  const std::vector<SeriesId>& contemporaneous_order() const { return topo_; }

  std::size_t edge_count() const;
  bool operator==(const LagStructure& o) const;

 private:
  void rebuild();

  int d_latent_ = 0;
  int d_observed_ = 0;
  int order_ = 0;
  std::vector<std::vector<int>> lags_;  // [target * dim + source]
  std::vector<std::vector<LagEdge>> in_;
  std::vector<std::vector<LagEdge>> out_;
  std::vector<SeriesId> topo_;
};

enum class KindFilter { All, Latent, Observed };

VertexSet parents(const LagStructure& g, const Vertex& v,
                  KindFilter filter = KindFilter::All);
VertexSet parents(const LagStructure& g, const VertexSet& vs,
                  KindFilter filter = KindFilter::All);
VertexSet children(const LagStructure& g, const Vertex& v);

// lag_index is 0-based into self_lags(series).
bool same_residue_class(const LagStructure& g, SeriesId series, int lag_index,
                        std::int64_t t1, std::int64_t t2);
bool same_residue_class_for_lag(int lag, std::int64_t t1, std::int64_t t2);

struct SearchLimits {
  // 0 selects 10 * (p + 1) * d.
  std::size_t max_vertices = 0;
  std::size_t resolve(const LagStructure& g) const;
};

// True iff every directed path into q from a latent vertex earlier than
// t_inf(B_U) passes through B_U. q itself is not counted as a source.
bool latent_ancestry_blocked(const LagStructure& g, const Vertex& q,
                             const VertexSet& B_U, SearchLimits lim = {});

// Strict latent ancestors of the seeds reachable without expanding B_U.
// Throws when a vertex earlier than t_inf(B_U) is reached or the cap is hit.
VertexSet latent_ancestors_bounded(const LagStructure& g,
                                   const VertexSet& seeds, const VertexSet& B_U,
                                   SearchLimits lim = {});

// b is a descendant of a (reflexive).
bool is_descendant(const LagStructure& g, const Vertex& a, const Vertex& b);
bool is_descendant_of_any(const LagStructure& g, const VertexSet& as,
                          const Vertex& b);

VertexSet forb_an(const LagStructure& g, const VertexSet& B_U,
                  const VertexSet& F_obs, const Vertex& y,
                  SearchLimits lim = {});

enum class TauMode { Default, Tight };

std::int64_t valid_tau(const LagStructure& g, const VertexSet& forb,
                       SeriesId series, std::int64_t t_ref,
                       TauMode mode = TauMode::Default);
bool is_valid_tau(const LagStructure& g, const VertexSet& forb,
                  SeriesId series, std::int64_t t_ref, std::int64_t tau);

// Earliest time of any descendant of forb in each series, or INT64_MAX.
std::vector<std::int64_t> earliest_descendant_times(const LagStructure& g,
                                                    const VertexSet& forb);

}  // namespace svarid
