#include "svarid/graph.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "svarid/error.hpp"

namespace svarid {

std::int64_t t_inf(const VertexSet& s) {
  if (s.empty()) throw SpecError("t_inf of empty vertex set");
  return s.begin()->time;
}

std::int64_t t_sup(const VertexSet& s) {
  if (s.empty()) throw SpecError("t_sup of empty vertex set");
  return s.rbegin()->time;
}

VertexSet shifted(const VertexSet& s, std::int64_t by) {
  VertexSet out;
  for (const auto& v : s) out.insert(v.shifted(by));
  return out;
}

VertexSet set_union(const VertexSet& a, const VertexSet& b) {
  VertexSet out = a;
  out.insert(b.begin(), b.end());
  return out;
}

VertexSet set_intersection(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::inserter(out, out.end()));
  return out;
}

VertexSet set_difference(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::inserter(out, out.end()));
  return out;
}

LagStructure::LagStructure(int d_latent, int d_observed)
    : d_latent_(d_latent), d_observed_(d_observed) {
  if (d_latent < 0 || d_observed < 1)
    throw SpecError("need d_U >= 0 and d_O >= 1");
  const int d = dim();
  lags_.assign(static_cast<std::size_t>(d * d), {});
  rebuild();
}

SeriesId LagStructure::latent(int k) const {
  if (k < 0 || k >= d_latent_) throw SpecError("latent index out of range");
  return SeriesId{k};
}

SeriesId LagStructure::observed(int k) const {
  if (k < 0 || k >= d_observed_) throw SpecError("observed index out of range");
  return SeriesId{d_latent_ + k};
}

void LagStructure::check(SeriesId s) const {
  if (s.index < 0 || s.index >= dim())
    throw SpecError("series index " + std::to_string(s.index) +
                    " out of range");
}

std::string LagStructure::name(SeriesId s) const {
  check(s);
  if (is_latent(s)) return "U" + std::to_string(s.index + 1);
  return "O" + std::to_string(s.index - d_latent_ + 1);
}

std::string LagStructure::name(const Vertex& v) const {
  std::string out = name(v.series) + "_t";
  if (v.time > 0) out += "+" + std::to_string(v.time);
  if (v.time < 0) out += std::to_string(v.time);
  return out;
}

SeriesId LagStructure::parse(const std::string& name) const {
  if (name == "Y") return observed(0);
  if (name.size() < 2 || (name[0] != 'U' && name[0] != 'O'))
    throw SpecError("bad series name '" + name + "'");
  int k = 0;
  try {
    std::size_t used = 0;
    k = std::stoi(name.substr(1), &used);
    if (used != name.size() - 1) throw SpecError("");
  } catch (...) {
    throw SpecError("bad series name '" + name + "'");
  }
  if (name[0] == 'U') {
    if (k < 1 || k > d_latent_) throw SpecError("no latent series " + name);
    return SeriesId{k - 1};
  }
  if (k < 1 || k > d_observed_) throw SpecError("no observed series " + name);
  return SeriesId{d_latent_ + k - 1};
}

void LagStructure::add_edge(SeriesId target, SeriesId source, int lag) {
  check(target);
  check(source);
  if (lag < 0) throw SpecError("negative lag");
  if (lag == 0 && target == source)
    throw SpecError("contemporaneous self edge on " + name(target));
  if (is_latent(target) && !is_latent(source))
    throw SpecError("edge from observed " + name(source) + " to latent " +
                    name(target));
  auto& v = lags_[static_cast<std::size_t>(target.index * dim() + source.index)];
  if (std::find(v.begin(), v.end(), lag) != v.end()) return;
  v.push_back(lag);
  std::sort(v.begin(), v.end());
  try {
    rebuild();
  } catch (const SpecError&) {
    v.erase(std::find(v.begin(), v.end(), lag));
    rebuild();
    throw SpecError("lag-0 edge " + name(source) + " -> " + name(target) +
                    " closes a contemporaneous cycle");
  }
}

const std::vector<int>& LagStructure::lags(SeriesId target,
                                           SeriesId source) const {
  check(target);
  check(source);
  return lags_[static_cast<std::size_t>(target.index * dim() + source.index)];
}

const std::vector<LagEdge>& LagStructure::incoming(SeriesId target) const {
  check(target);
  return in_[static_cast<std::size_t>(target.index)];
}

const std::vector<LagEdge>& LagStructure::outgoing(SeriesId source) const {
  check(source);
  return out_[static_cast<std::size_t>(source.index)];
}

std::size_t LagStructure::edge_count() const {
  std::size_t n = 0;
  for (const auto& v : lags_) n += v.size();
  return n;
}

bool LagStructure::operator==(const LagStructure& o) const {
  return d_latent_ == o.d_latent_ && d_observed_ == o.d_observed_ &&
         lags_ == o.lags_;
}

void LagStructure::rebuild() {
  const int d = dim();
  in_.assign(static_cast<std::size_t>(d), {});
  out_.assign(static_cast<std::size_t>(d), {});
  order_ = 0;
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      for (int h : lags_[static_cast<std::size_t>(j * d + k)]) {
        in_[static_cast<std::size_t>(j)].push_back({SeriesId{k}, h});
        out_[static_cast<std::size_t>(k)].push_back({SeriesId{j}, h});
        order_ = std::max(order_, h);
      }
    }
  }
  auto by_lag = [](const LagEdge& a, const LagEdge& b) {
    return a.lag != b.lag ? a.lag < b.lag : a.other < b.other;
  };
  for (auto& v : in_) std::sort(v.begin(), v.end(), by_lag);
  for (auto& v : out_) std::sort(v.begin(), v.end(), by_lag);

  // Kahn on lag-0 edges; smallest index first for a stable order.
  std::vector<int> indeg(static_cast<std::size_t>(d), 0);
  for (int j = 0; j < d; ++j)
    for (const auto& e : in_[static_cast<std::size_t>(j)])
      if (e.lag == 0) ++indeg[static_cast<std::size_t>(j)];
  std::set<int> ready;
  for (int j = 0; j < d; ++j)
    if (indeg[static_cast<std::size_t>(j)] == 0) ready.insert(j);
  topo_.clear();
  while (!ready.empty()) {
    int k = *ready.begin();
    ready.erase(ready.begin());
    topo_.push_back(SeriesId{k});
    for (const auto& e : out_[static_cast<std::size_t>(k)])
      if (e.lag == 0 && --indeg[static_cast<std::size_t>(e.other.index)] == 0)
        ready.insert(e.other.index);
  }
  if (static_cast<int>(topo_.size()) != d)
    throw SpecError("contemporaneous edges contain a cycle");
}

namespace {

bool keep(const LagStructure& g, SeriesId s, KindFilter f) {
  switch (f) {
    case KindFilter::All:
      return true;
    case KindFilter::Latent:
      return g.is_latent(s);
    case KindFilter::Observed:
      return !g.is_latent(s);
  }
  return true;
}

}  // namespace

VertexSet parents(const LagStructure& g, const Vertex& v, KindFilter filter) {
  VertexSet out;
  for (const auto& e : g.incoming(v.series))
    if (keep(g, e.other, filter)) out.insert({e.other, v.time - e.lag});
  return out;
}

VertexSet parents(const LagStructure& g, const VertexSet& vs,
                  KindFilter filter) {
  VertexSet out;
  for (const auto& v : vs) {
    auto p = parents(g, v, filter);
    out.insert(p.begin(), p.end());
  }
  return out;
}

VertexSet children(const LagStructure& g, const Vertex& v) {
  VertexSet out;
  for (const auto& e : g.outgoing(v.series))
    out.insert({e.other, v.time + e.lag});
  return out;
}

bool same_residue_class_for_lag(int lag, std::int64_t t1, std::int64_t t2) {
  if (lag <= 0) throw SpecError("residue classes need a positive lag");
  return (t1 - t2) % lag == 0;
}

bool same_residue_class(const LagStructure& g, SeriesId series, int lag_index,
                        std::int64_t t1, std::int64_t t2) {
  const auto& sl = g.self_lags(series);
  if (sl.empty())
    throw SpecError("no residue classes for " + g.name(series));
  if (lag_index < 0 || lag_index >= static_cast<int>(sl.size()))
    throw SpecError("self-lag index out of range");
  return same_residue_class_for_lag(sl[static_cast<std::size_t>(lag_index)],
                                    t1, t2);
}

std::size_t SearchLimits::resolve(const LagStructure& g) const {
  if (max_vertices > 0) return max_vertices;
  return static_cast<std::size_t>(10 * (g.order() + 1) * g.dim());
}

namespace {

enum class Search { Blocked, Escaped };

// Walks latent parents from the seeds without expanding B_U members.
Search latent_search(const LagStructure& g, const VertexSet& seeds,
                     const VertexSet& B_U, std::size_t cap, VertexSet& found) {
  const bool bounded = !B_U.empty();
  const std::int64_t floor = bounded ? t_inf(B_U) : 0;
  std::vector<Vertex> stack;
  for (const auto& s : seeds)
    if (!B_U.contains(s)) stack.push_back(s);
  bool escaped = false;
  while (!stack.empty()) {
    Vertex u = stack.back();
    stack.pop_back();
    for (const auto& e : g.incoming(u.series)) {
      if (!g.is_latent(e.other)) continue;
      Vertex w{e.other, u.time - e.lag};
      if (!found.insert(w).second) continue;
      if (!bounded || w.time < floor) {
        escaped = true;
        continue;
      }
      if (found.size() > cap)
        throw SpecError("unbounded latent ancestry: search exceeded " +
                        std::to_string(cap) + " vertices");
      if (!B_U.contains(w)) stack.push_back(w);
    }
  }
  return escaped ? Search::Escaped : Search::Blocked;
}

}  // namespace

bool latent_ancestry_blocked(const LagStructure& g, const Vertex& q,
                             const VertexSet& B_U, SearchLimits lim) {
  if (!g.is_latent(q.series))
    throw SpecError("latent_ancestry_blocked: " + g.name(q) + " is observed");
  for (const auto& b : B_U)
    if (!g.is_latent(b.series)) throw SpecError("B_U must be latent");
  VertexSet seeds;
  for (const auto& e : g.incoming(q.series))
    if (g.is_latent(e.other)) seeds.insert({e.other, q.time - e.lag});
  for (const auto& s : seeds)
    if (B_U.empty() || s.time < t_inf(B_U)) return false;
  VertexSet found = seeds;
  return latent_search(g, seeds, B_U, lim.resolve(g), found) ==
         Search::Blocked;
}

VertexSet latent_ancestors_bounded(const LagStructure& g,
                                   const VertexSet& seeds, const VertexSet& B_U,
                                   SearchLimits lim) {
  VertexSet found;
  if (latent_search(g, seeds, B_U, lim.resolve(g), found) == Search::Escaped)
    throw SpecError("unbounded latent ancestry");
  return found;
}

bool is_descendant(const LagStructure& g, const Vertex& a, const Vertex& b) {
  if (a == b) return true;
  if (b.time < a.time) return false;
  VertexSet seen{a};
  std::vector<Vertex> stack{a};
  while (!stack.empty()) {
    Vertex u = stack.back();
    stack.pop_back();
    for (const auto& e : g.outgoing(u.series)) {
      Vertex w{e.other, u.time + e.lag};
      if (w.time > b.time) continue;
      if (w == b) return true;
      if (seen.insert(w).second) stack.push_back(w);
    }
  }
  return false;
}

bool is_descendant_of_any(const LagStructure& g, const VertexSet& as,
                          const Vertex& b) {
  for (const auto& a : as)
    if (is_descendant(g, a, b)) return true;
  return false;
}

VertexSet forb_an(const LagStructure& g, const VertexSet& B_U,
                  const VertexSet& F_obs, const Vertex& y, SearchLimits lim) {
  VertexSet targets = F_obs;
  targets.insert(y);
  VertexSet seeds = parents(g, targets, KindFilter::Latent);
  for (const auto& q : seeds) {
    if (B_U.contains(q)) continue;
    if (!latent_ancestry_blocked(g, q, B_U, lim))
      throw SpecError("unbounded latent ancestry: " + g.name(q) +
                      " is not blocked by B_U");
  }
  VertexSet anc = latent_ancestors_bounded(g, seeds, B_U, lim);
  anc.insert(seeds.begin(), seeds.end());
  VertexSet out = targets;
  for (const auto& v : anc) {
    bool feeds_b = false;
    for (const auto& b : B_U)
      if (is_descendant(g, v, b)) {
        feeds_b = true;
        break;
      }
    if (!feeds_b) out.insert(v);
  }
  return out;
}

std::vector<std::int64_t> earliest_descendant_times(const LagStructure& g,
                                                    const VertexSet& forb) {
  const auto none = std::numeric_limits<std::int64_t>::max();
  std::vector<std::int64_t> e(static_cast<std::size_t>(g.dim()), none);
  for (const auto& f : forb) {
    auto& slot = e[static_cast<std::size_t>(f.series.index)];
    slot = std::min(slot, f.time);
  }
  for (int pass = 0; pass <= g.dim(); ++pass) {
    bool changed = false;
    for (int s = 0; s < g.dim(); ++s) {
      if (e[static_cast<std::size_t>(s)] == none) continue;
      for (const auto& edge : g.outgoing(SeriesId{s})) {
        auto cand = e[static_cast<std::size_t>(s)] + edge.lag;
        auto& slot = e[static_cast<std::size_t>(edge.other.index)];
        if (cand < slot) {
          slot = cand;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  return e;
}

std::int64_t valid_tau(const LagStructure& g, const VertexSet& forb,
                       SeriesId series, std::int64_t t_ref, TauMode mode) {
  g.check(series);
  if (forb.empty()) throw SpecError("valid_tau needs a nonempty forb set");
  const std::int64_t fallback = t_ref - t_inf(forb) + 1;
  if (mode == TauMode::Default) return fallback;
  auto e = earliest_descendant_times(g, forb);
  auto first = e[static_cast<std::size_t>(series.index)];
  if (first == std::numeric_limits<std::int64_t>::max()) return fallback;
  return t_ref - first + 1;
}

bool is_valid_tau(const LagStructure& g, const VertexSet& forb,
                  SeriesId series, std::int64_t t_ref, std::int64_t tau) {
  auto e = earliest_descendant_times(g, forb);
  auto first = e[static_cast<std::size_t>(series.index)];
  if (first == std::numeric_limits<std::int64_t>::max()) return true;
  return t_ref - tau < first;
}

}  // namespace svarid
