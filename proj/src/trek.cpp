#include "svarid/trek.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "svarid/error.hpp"

namespace svarid {

namespace {

double edge_coef(const SvarParams& p, const Vertex& from, const Vertex& to) {
  const auto h = to.time - from.time;
  if (h < 0 || h > p.order()) return 0.0;
  return p.coef(static_cast<int>(h), to.series, from.series);
}

// Directed paths from top down to target, every vertex at time >= top.
void paths_down(const LagStructure& g, const Vertex& target,
                std::vector<Vertex>& cur,
                std::vector<std::vector<Vertex>>& out, std::size_t cap) {
  const Vertex u = cur.back();
  if (u == target) {
    out.push_back(cur);
    if (out.size() > cap) throw SpecError("trek enumeration exceeded cap");
    return;
  }
  for (const auto& e : g.outgoing(u.series)) {
    Vertex w{e.other, u.time + e.lag};
    if (w.time > target.time) continue;
    cur.push_back(w);
    paths_down(g, target, cur, out, cap);
    cur.pop_back();
  }
}

}  // namespace

double trek_monomial(const SvarParams& params, const Trek& trek) {
  if (trek.left.empty() || trek.right.empty() ||
      trek.left.back() != trek.right.front())
    throw SpecError("malformed trek");
  double m = params.noise_var(trek.top().series.index);
  for (std::size_t i = 0; i + 1 < trek.left.size(); ++i)
    m *= edge_coef(params, trek.left[i + 1], trek.left[i]);
  for (std::size_t i = 0; i + 1 < trek.right.size(); ++i)
    m *= edge_coef(params, trek.right[i], trek.right[i + 1]);
  return m;
}

std::vector<Trek> enumerate_treks(const LagStructure& g, const Vertex& v1,
                                  const Vertex& v2, int depth,
                                  std::size_t max_count) {
  std::vector<Trek> out;
  const auto tmin = std::min(v1.time, v2.time);
  for (std::int64_t tt = tmin - depth; tt <= tmin; ++tt) {
    for (int k = 0; k < g.dim(); ++k) {
      Vertex top{SeriesId{k}, tt};
      std::vector<std::vector<Vertex>> to1, to2;
      std::vector<Vertex> cur{top};
      paths_down(g, v1, cur, to1, max_count);
      if (to1.empty()) continue;
      paths_down(g, v2, cur, to2, max_count);
      for (const auto& a : to1)
        for (const auto& b : to2) {
          Trek t;
          t.left.assign(a.rbegin(), a.rend());
          t.right = b;
          out.push_back(std::move(t));
          if (out.size() > max_count)
            throw SpecError("trek enumeration exceeded cap");
        }
    }
  }
  return out;
}

double trek_sum_truncated(const SvarParams& params, const Vertex& v1,
                          const Vertex& v2, int depth) {
  if (depth < 0) throw SpecError("negative trek depth");
  const auto& g = params.graph;
  const int d = g.dim();
  const auto tmin = std::min(v1.time, v2.time);
  const auto span = std::max(v1.time, v2.time) - tmin + depth;
  const std::size_t W = static_cast<std::size_t>(span) + 1;
  // P[k][j][o]: sum of path products from S^k_0 to S^j_o.
  std::vector<double> P(static_cast<std::size_t>(d * d) * W, 0.0);
  auto at = [&](int k, int j, std::int64_t o) -> double& {
    return P[(static_cast<std::size_t>(k) * static_cast<std::size_t>(d) +
              static_cast<std::size_t>(j)) * W + static_cast<std::size_t>(o)];
  };
  for (int k = 0; k < d; ++k)
    for (std::int64_t o = 0; o <= span; ++o)
      for (const auto& s : g.contemporaneous_order()) {
        double x = (s.index == k && o == 0) ? 1.0 : 0.0;
        for (const auto& e : g.incoming(s))
          if (o - e.lag >= 0)
            x += params.coef(e.lag, s, e.other) * at(k, e.other.index, o - e.lag);
        at(k, s.index, o) = x;
      }
  double sum = 0.0;
  for (int m = 0; m <= depth; ++m) {
    const auto tt = tmin - m;
    for (int k = 0; k < d; ++k)
      sum += params.noise_var(k) * at(k, v1.series.index, v1.time - tt) *
             at(k, v2.series.index, v2.time - tt);
  }
  return sum;
}

double parent_decomposition_residual(const SvarParams& params, const Vertex& a,
                                     const Vertex& b, const CovarianceTable& cov,
                                     const VertexSet& extra_parents) {
  if (is_descendant(params.graph, b, a))
    throw SpecError("parent decomposition needs a not to be a descendant of b");
  VertexSet pa = set_union(parents(params.graph, b), extra_parents);
  double rhs = 0.0;
  for (const auto& q : pa) rhs += edge_coef(params, q, b) * cov.cov(a, q);
  return std::abs(cov.cov(a, b) - rhs);
}

}  // namespace svarid
