#include "svarid/identify.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <sstream>
#include <tuple>

#include "svarid/error.hpp"

namespace svarid {

namespace {

std::string join(const LagStructure& g, const VertexSet& vs) {
  std::string out = "{";
  bool first = true;
  for (const auto& v : vs) {
    if (!first) out += ", ";
    out += g.name(v);
    first = false;
  }
  return out + "}";
}

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  auto r = a % m;
  return r < 0 ? r + m : r;
}

bool distinct_classes(const std::vector<Vertex>& vs, int lag) {
  std::vector<std::int64_t> seen;
  for (const auto& v : vs) {
    auto r = floor_mod(v.time, lag);
    if (std::find(seen.begin(), seen.end(), r) != seen.end()) return false;
    seen.push_back(r);
  }
  return true;
}

std::vector<Vertex> in_series(const std::vector<Vertex>& vs, SeriesId s) {
  std::vector<Vertex> out;
  for (const auto& v : vs)
    if (v.series == s) out.push_back(v);
  return out;
}

VertexSet in_series(const VertexSet& vs, SeriesId s) {
  VertexSet out;
  for (const auto& v : vs)
    if (v.series == s) out.insert(v);
  return out;
}

std::int64_t max_time(const std::vector<Vertex>& vs) {
  std::int64_t m = vs.front().time;
  for (const auto& v : vs) m = std::max(m, v.time);
  return m;
}

std::int64_t min_time(const std::vector<Vertex>& vs) {
  std::int64_t m = vs.front().time;
  for (const auto& v : vs) m = std::min(m, v.time);
  return m;
}

Check blocked_check(const LagStructure& g, const std::string& name,
                    const VertexSet& qs, const VertexSet& B_U,
                    SearchLimits lim) {
  Check c{name, true, ""};
  VertexSet bad;
  for (const auto& q : qs) {
    if (B_U.contains(q)) continue;
    try {
      if (!latent_ancestry_blocked(g, q, B_U, lim)) bad.insert(q);
    } catch (const SpecError&) {
      bad.insert(q);
    }
  }
  if (!bad.empty()) {
    c.pass = false;
    c.witness = "not blocked: " + join(g, bad);
  } else {
    c.witness = "latent parents " + join(g, qs);
  }
  return c;
}

}  // namespace

bool all_pass(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Check& c) { return c.pass; });
}

const Check* find_check(const std::vector<Check>& checks,
                        const std::string& name) {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::int64_t EstimatorSpec::max_lag_span() const {
  std::int64_t span = 0;
  auto cols = C;
  cols.push_back(y);
  for (const auto& a : R)
    for (const auto& b : cols) span = std::max(span, std::abs(a.time - b.time));
  return span;
}

std::vector<Vertex> build_c(const LagStructure& g, const Vertex& y,
                            const VertexSet& F_obs,
                            const VertexSet& extra_y_parents) {
  VertexSet pa = set_union(parents(g, y, KindFilter::Observed), extra_y_parents);
  std::vector<Vertex> out(pa.begin(), pa.end());
  VertexSet seen = pa;
  for (const auto& f : F_obs)
    if (seen.insert(f).second) out.push_back(f);
  for (const auto& q : parents(g, F_obs, KindFilter::Observed))
    if (seen.insert(q).second) out.push_back(q);
  return out;
}

std::vector<CoeffColumn> make_coeff_map(const LagStructure& g, const Vertex& y,
                                        const std::vector<Vertex>& C,
                                        const VertexSet& extra_y_parents) {
  const VertexSet pa = parents(g, y, KindFilter::Observed);
  std::vector<CoeffColumn> out;
  for (std::size_t j = 0; j < C.size(); ++j) {
    const auto& c = C[j];
    const bool real = pa.contains(c);
    if (!real && !extra_y_parents.contains(c)) continue;
    const auto lag = y.time - c.time;
    if (lag < 0) throw SpecError("declared parent " + g.name(c) + " lies after y");
    if (g.is_latent(c.series)) throw SpecError("C must be observed");
    out.push_back({static_cast<int>(j), static_cast<int>(lag), y.series, c.series,
                   !real});
  }
  return out;
}

void assign_taus(const LagStructure& g, const Vertex& y, Certificate& cert,
                 TauMode mode, SearchLimits lim) {
  const VertexSet forb = forb_an(g, cert.B_U, cert.F_obs, y, lim);
  cert.tau.clear();
  for (int k = 0; k < g.d_observed(); ++k)
    cert.tau.push_back(valid_tau(g, forb, g.observed(k), y.time, mode));
}

std::pair<VertexSet, VertexSet> construct_bu_fobs(const LagStructure& g,
                                                  SeriesId i0,
                                                  std::int64_t delta,
                                                  const Vertex& y) {
  if (g.d_latent() != 1)
    throw SpecError("automatic B_U construction needs d_U = 1; use general checks");
  g.check(i0);
  if (g.is_latent(i0)) throw SpecError("anchor series must be observed");
  const SeriesId u = g.latent(0);
  const auto& ul = g.self_lags(u);
  if (ul.empty()) throw SpecError("latent series has no self-lags");
  if (g.lags(i0, u).empty())
    throw SpecError("no edge from the latent series into " + g.name(i0));
  const int L = ul.back();
  VertexSet F;
  for (int k = 0; k < L; ++k) F.insert({i0, y.time + delta + k});
  VertexSet lat = parents(g, F, KindFilter::Latent);
  auto py = parents(g, y, KindFilter::Latent);
  lat.insert(py.begin(), py.end());
  const auto t0 = t_inf(lat);
  VertexSet B;
  for (int k = 0; k < L; ++k) B.insert({u, t0 + k});
  return {B, F};
}

UpsilonResult check_upsilon_uniqueness(const LagStructure& g,
                                       const VertexSet& B_U,
                                       const VertexSet& F_obs,
                                       UpsilonOptions opt) {
  if (B_U.size() != F_obs.size())
    throw SpecError("path systems need |B_U| = |F_obs|");
  UpsilonResult res;
  if (B_U.empty()) {
    res.unique = true;
    res.systems = 1;
    return res;
  }
  for (const auto& b : B_U)
    if (!g.is_latent(b.series)) throw SpecError("B_U must be latent");
  for (const auto& f : F_obs)
    if (g.is_latent(f.series)) throw SpecError("F_obs must be observed");
  const VertexSet anchor = set_union(B_U, parents(g, F_obs, KindFilter::Latent));
  const auto hi = t_sup(anchor);
  const std::vector<Vertex> fs(F_obs.begin(), F_obs.end());

  using EdgeType = std::array<int, 3>;  // lag, target, source
  struct Path {
    std::vector<Vertex> verts;
    std::size_t f = 0;
    std::vector<EdgeType> edges;
  };
  std::vector<std::vector<Path>> paths;
  std::size_t total = 0;
  for (const auto& b : B_U) {
    std::vector<Path> mine;
    Path cur;
    cur.verts.push_back(b);
    auto dfs = [&](auto&& self) -> void {
      const Vertex u = cur.verts.back();
      for (std::size_t k = 0; k < fs.size(); ++k) {
        const auto h = fs[k].time - u.time;
        const auto& l = g.lags(fs[k].series, u.series);
        if (h < 0 || std::find(l.begin(), l.end(), h) == l.end()) continue;
        Path p = cur;
        p.verts.push_back(fs[k]);
        p.f = k;
        p.edges.push_back({static_cast<int>(h), fs[k].series.index, u.series.index});
        mine.push_back(std::move(p));
        if (++total > opt.max_systems)
          throw SpecError("undecided at desk scale: too many directed paths");
      }
      for (const auto& e : g.outgoing(u.series)) {
        if (!g.is_latent(e.other)) continue;
        const Vertex w{e.other, u.time + e.lag};
        if (w.time > hi) continue;
        if (B_U.contains(u) && B_U.contains(w)) continue;
        cur.verts.push_back(w);
        cur.edges.push_back({e.lag, w.series.index, u.series.index});
        self(self);
        cur.verts.pop_back();
        cur.edges.pop_back();
      }
    };
    dfs(dfs);
    paths.push_back(std::move(mine));
  }

  struct Seen {
    std::size_t count = 0;
    std::vector<std::size_t> choice;
  };
  std::map<std::vector<EdgeType>, Seen> by_monomial;
  std::vector<std::size_t> choice(paths.size());
  std::vector<bool> used_f(fs.size(), false);
  VertexSet used;
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == paths.size()) {
      if (++res.systems > opt.max_systems)
        throw SpecError("undecided at desk scale: more than " +
                        std::to_string(opt.max_systems) + " path systems");
      std::vector<EdgeType> sig;
      for (std::size_t j = 0; j < paths.size(); ++j) {
        const auto& e = paths[j][choice[j]].edges;
        sig.insert(sig.end(), e.begin(), e.end());
      }
      std::sort(sig.begin(), sig.end());
      auto& s = by_monomial[sig];
      if (s.count++ == 0) s.choice = choice;
      return;
    }
    for (std::size_t c = 0; c < paths[i].size(); ++c) {
      const auto& p = paths[i][c];
      if (used_f[p.f]) continue;
      bool clash = false;
      for (const auto& v : p.verts)
        if (used.contains(v)) {
          clash = true;
          break;
        }
      if (clash) continue;
      used_f[p.f] = true;
      for (const auto& v : p.verts) used.insert(v);
      choice[i] = c;
      self(self, i + 1);
      used_f[p.f] = false;
      for (const auto& v : p.verts) used.erase(v);
    }
  };
  rec(rec, 0);

  const std::vector<std::size_t>* best = nullptr;
  for (const auto& [sig, s] : by_monomial)
    if (s.count == 1 && (best == nullptr || s.choice < *best)) best = &s.choice;
  if (best != nullptr) {
    res.unique = true;
    std::vector<std::size_t> perm;
    for (std::size_t j = 0; j < paths.size(); ++j) {
      res.witness.paths.push_back(paths[j][(*best)[j]].verts);
      perm.push_back(paths[j][(*best)[j]].f);
    }
    int sign = 1;
    for (std::size_t a = 0; a < perm.size(); ++a)
      for (std::size_t b = a + 1; b < perm.size(); ++b)
        if (perm[a] > perm[b]) sign = -sign;
    res.witness.sign = sign;
  }
  return res;
}

std::vector<Check> check_identification_conditions(
    const LagStructure& g,
    const Vertex& y,
    const VertexSet& B_U,
    const VertexSet& F_obs,
    const std::vector<Vertex>& R,
    const std::vector<Vertex>& C,
    CheckOptions opt) {
  std::vector<Check> out;
  out.push_back(blocked_check(g, "1", parents(g, y, KindFilter::Latent), B_U,
                              opt.limits));
  out.push_back({"2a", B_U.size() == F_obs.size(),
                 std::to_string(B_U.size()) + " vs " +
                     std::to_string(F_obs.size())});
  out.push_back(blocked_check(g, "2b", parents(g, F_obs, KindFilter::Latent),
                              B_U, opt.limits));
  if (opt.check_upsilon) {
    try {
      auto u = check_upsilon_uniqueness(g, B_U, F_obs, opt.upsilon);
      out.push_back({"2c", u.unique,
                     std::to_string(u.systems) + " path systems enumerated"});
    } catch (const SpecError& e) {
      out.push_back({"2c", false, e.what()});
    }
  } else {
    out.push_back({"2c", true, "not enumerated"});
  }
  {
    VertexSet lhs = set_union(F_obs, parents(g, F_obs, KindFilter::Observed));
    VertexSet rhs = parents(g, y, KindFilter::Observed);
    rhs.insert(y);
    auto both = set_intersection(lhs, rhs);
    out.push_back({"3", both.empty(), both.empty() ? "" : join(g, both)});
  }
  try {
    const VertexSet forb = forb_an(g, B_U, F_obs, y, opt.limits);
    VertexSet bad;
    for (const auto& r : R)
      if (is_descendant_of_any(g, forb, r)) bad.insert(r);
    out.push_back({"4", bad.empty(),
                   bad.empty() ? "ForbAn " + join(g, forb)
                               : "descendants of ForbAn: " + join(g, bad)});
  } catch (const SpecError& e) {
    out.push_back({"4", false, e.what()});
  }
  out.push_back({"|R|=|C|", R.size() == C.size(),
                 std::to_string(R.size()) + " vs " + std::to_string(C.size())});
  return out;
}

CReport check_conditions_c(const LagStructure& g, const Vertex& y,
                           const Certificate& cert,
                           const std::optional<RPartition>& partition) {
  if (static_cast<int>(cert.tau.size()) != g.d_observed())
    throw SpecError("certificate needs one tau per observed series");
  CReport rep;
  const auto C = build_c(g, y, cert.F_obs);
  std::vector<Vertex> C1;
  for (const auto& c : C)
    if (!cert.F_obs.contains(c)) C1.push_back(c);
  const std::vector<Vertex> C2(cert.F_obs.begin(), cert.F_obs.end());
  const auto t = y.time;

  for (int k = 0; k < g.d_observed(); ++k) {
    SeriesWitness w;
    w.series = g.observed(k);
    w.tau = cert.tau[static_cast<std::size_t>(k)];
    w.C1 = in_series(C1, w.series);
    w.C2 = in_series(C2, w.series);
    rep.series.push_back(w);
  }

  // (C2): largest self-lag separating the upper part of C^(1).
  {
    Check c{"C2", true, ""};
    for (auto& w : rep.series) {
      if (w.C1.empty()) continue;
      const auto& sl = g.self_lags(w.series);
      for (auto it = sl.rbegin(); it != sl.rend(); ++it) {
        const int l = *it;
        std::vector<Vertex> upper;
        for (const auto& v : w.C1)
          if (v.time >= t - w.tau - (l - 1)) upper.push_back(v);
        if (distinct_classes(upper, l)) {
          w.self_lag = l;
          break;
        }
      }
      if (w.self_lag) {
        c.witness += g.name(w.series) + ":l=" + std::to_string(*w.self_lag) + " ";
      } else {
        c.pass = false;
        c.witness += g.name(w.series) + ":none ";
      }
    }
    rep.checks.push_back(c);
  }

  {
    Check c{"C5.1", true, ""};
    for (const auto& w : rep.series)
      if (!w.C1.empty() && !w.C2.empty() && !(max_time(w.C1) < min_time(w.C2))) {
        c.pass = false;
        c.witness += g.name(w.series) + " ";
      }
    rep.checks.push_back(c);
  }

  // (C6)/(C6.1): pick one latent edge per series with C^(2), first passing
  // combination in (latent index, lag) order.
  {
    std::vector<std::size_t> need;
    std::vector<std::vector<LagEdge>> options;
    bool c6 = true;
    std::string w6;
    for (std::size_t i = 0; i < rep.series.size(); ++i) {
      if (rep.series[i].C2.empty()) continue;
      std::vector<LagEdge> opts;
      for (const auto& e : g.incoming(rep.series[i].series))
        if (g.is_latent(e.other)) opts.push_back(e);
      std::sort(opts.begin(), opts.end(), [](const LagEdge& a, const LagEdge& b) {
        return a.other != b.other ? a.other < b.other : a.lag < b.lag;
      });
      if (opts.empty()) {
        c6 = false;
        w6 += g.name(rep.series[i].series) + " has no latent parent ";
      }
      need.push_back(i);
      options.push_back(std::move(opts));
    }
    rep.checks.push_back({"C6", c6, w6});
    bool c61 = need.empty();
    std::string w61;
    if (c6 && !need.empty()) {
      std::vector<std::size_t> idx(need.size(), 0);
      std::size_t tried = 0;
      while (true) {
        std::map<int, std::vector<Vertex>> P;
        for (std::size_t a = 0; a < need.size(); ++a) {
          const auto& e = options[a][idx[a]];
          for (const auto& f : rep.series[need[a]].C2)
            P[e.other.index].push_back({e.other, f.time - e.lag});
        }
        std::map<int, int> lags;
        bool ok = true;
        for (const auto& [k, pk] : P) {
          VertexSet uniq(pk.begin(), pk.end());
          if (uniq.size() != pk.size()) {
            ok = false;
            break;
          }
          const auto& sl = g.self_lags(SeriesId{k});
          int found = 0;
          for (auto it = sl.rbegin(); it != sl.rend(); ++it)
            if (distinct_classes(pk, *it)) {
              found = *it;
              break;
            }
          if (found == 0) {
            ok = false;
            break;
          }
          lags[k] = found;
        }
        if (ok) {
          c61 = true;
          rep.latent_lag = lags;
          for (std::size_t a = 0; a < need.size(); ++a)
            rep.series[need[a]].latent_edge = options[a][idx[a]];
          for (const auto& [k, pk] : P) rep.P.insert(pk.begin(), pk.end());
          for (const auto& [k, l] : lags)
            w61 += g.name(SeriesId{k}) + ":l=" + std::to_string(l) + " ";
          w61 += "P=" + join(g, rep.P);
          break;
        }
        if (++tried > 100000) {
          w61 = "edge combinations exhausted the search budget";
          break;
        }
        std::size_t a = 0;
        while (a < need.size() && ++idx[a] == options[a].size()) idx[a++] = 0;
        if (a == need.size()) {
          w61 = "no latent lag separates P";
          break;
        }
      }
    }
    rep.checks.push_back({"C6.1", c61, w61});
  }

  if (!partition) return rep;
  const auto& R1 = partition->R1;
  const auto& R2 = partition->R2;

  {
    Check c{"C1", true, ""};
    if (!set_intersection(R1, R2).empty()) {
      c.pass = false;
      c.witness = "R1 and R2 overlap ";
    }
    for (const auto& r : set_union(R1, R2))
      if (g.is_latent(r.series)) {
        c.pass = false;
        c.witness += "latent member " + g.name(r) + " ";
      }
    for (const auto& w : rep.series) {
      auto a = in_series(R1, w.series).size();
      auto b = in_series(R2, w.series).size();
      if (a != w.C1.size() || b != w.C2.size()) {
        c.pass = false;
        c.witness += g.name(w.series) + " sizes ";
      }
    }
    rep.checks.insert(rep.checks.begin(), c);
  }

  Check c3{"C3", true, ""}, c4{"C4", true, ""}, c52{"C5.2", true, ""};
  for (const auto& w : rep.series) {
    const auto r1 = in_series(R1, w.series);
    const auto r2 = in_series(R2, w.series);
    if (!r1.empty() && !r2.empty() && !(t_sup(r2) < t_inf(r1))) {
      c52.pass = false;
      c52.witness += g.name(w.series) + " ";
    }
    if (w.C1.empty()) continue;
    if (!w.self_lag) {
      c3.pass = c4.pass = false;
      continue;
    }
    const int l = *w.self_lag;
    const auto lo = t - w.tau - (l - 1);
    const auto hi = t - w.tau;
    for (const auto& c : w.C1) {
      if (c.time >= lo) {
        int n = 0;
        for (const auto& r : r1)
          if (r.time >= lo && r.time <= hi && floor_mod(r.time - c.time, l) == 0) ++n;
        if (n != 1) {
          c3.pass = false;
          c3.witness += g.name(c) + " has " + std::to_string(n) + " matches ";
        }
      } else if (!r1.contains(c)) {
        c4.pass = false;
        c4.witness += g.name(c) + " missing ";
      }
    }
  }
  auto at = [&](const std::string& name) {
    return std::find_if(rep.checks.begin(), rep.checks.end(),
                        [&](const Check& c) { return c.name == name; });
  };
  rep.checks.insert(at("C5.1"), {c3, c4});
  rep.checks.insert(at("C5.1") + 1, c52);

  Check c62{"C6.2", true, ""};
  if (!find_check(rep.checks, "C6.1")->pass) {
    c62.pass = false;
    c62.witness = "needs C6.1";
  } else {
    std::map<int, std::vector<Vertex>> Q;
    for (const auto& w : rep.series) {
      if (!w.latent_edge) continue;
      for (const auto& r : in_series(R2, w.series)) {
        Vertex q{w.latent_edge->other, r.time - w.latent_edge->lag};
        Q[q.series.index].push_back(q);
        rep.Q.insert(q);
      }
    }
    for (const auto& p : rep.P) {
      const int l = rep.latent_lag.at(p.series.index);
      int n = 0;
      for (const auto& q : Q[p.series.index])
        if (floor_mod(q.time - p.time, l) == 0) ++n;
      if (n != 1) {
        c62.pass = false;
        c62.witness += g.name(p) + " has " + std::to_string(n) + " matches ";
      }
    }
    if (c62.pass) c62.witness = "Q=" + join(g, rep.Q);
  }
  rep.checks.push_back(c62);
  return rep;
}

EstimatorSpec construct_r(const LagStructure& g, const Vertex& y,
                          const Certificate& cert, SearchLimits lim,
                          CReport* report, RPartition* partition) {
  const CReport pre = check_conditions_c(g, y, cert);
  for (const auto& c : pre.checks)
    if (!c.pass)
      throw SpecError("construct_r: condition " + c.name + " failed " + c.witness);
  const auto C = build_c(g, y, cert.F_obs);
  const auto t = y.time;

  std::vector<Vertex> R;
  RPartition part;
  for (const auto& c : C) {
    if (cert.F_obs.contains(c)) continue;
    const auto& w = pre.series[static_cast<std::size_t>(c.series.index - g.d_latent())];
    const int l = *w.self_lag;
    const auto lo = t - w.tau - (l - 1);
    Vertex r = c.time >= lo ? Vertex{c.series, lo + floor_mod(c.time - lo, l)} : c;
    if (part.R1.insert(r).second) R.push_back(r);
  }
  for (const auto& w : pre.series) {
    if (w.C2.empty()) continue;
    const auto l = static_cast<std::int64_t>(pre.latent_lag.at(w.latent_edge->other.index));
    auto bound = t - w.tau;
    auto r1 = in_series(part.R1, w.series);
    if (!r1.empty()) bound = std::min(bound, t_inf(r1) - 1);
    const auto top = max_time(w.C2);
    std::int64_t s = 0;
    if (top > bound) s = ((top - bound + l - 1) / l) * l;
    for (const auto& f : w.C2) {
      Vertex r = f.shifted(-s);
      if (part.R2.insert(r).second) R.push_back(r);
    }
  }
  CReport full = check_conditions_c(g, y, cert, part);
  for (const auto& c : full.checks)
    if (!c.pass)
      throw SpecError("construct_r: constructed R violates " + c.name + " " + c.witness);
  const VertexSet forb = forb_an(g, cert.B_U, cert.F_obs, y, lim);
  for (const auto& r : R)
    if (is_descendant_of_any(g, forb, r))
      throw SpecError("construct_r: " + g.name(r) + " descends from ForbAn");
  if (R.size() != C.size()) throw SpecError("construct_r: |R| != |C|");

  EstimatorSpec spec;
  spec.y = y;
  spec.R = R;
  spec.C = C;
  spec.coeff_map = make_coeff_map(g, y, C);
  std::ostringstream os;
  os << "delta_sweep delta=" << cert.delta << " anchor=" << g.name(cert.anchor);
  spec.provenance = os.str();
  if (report) *report = std::move(full);
  if (partition) *partition = std::move(part);
  return spec;
}

std::vector<SweepResult> delta_sweep(const LagStructure& g, const Vertex& y,
                                     SweepOptions opt) {
  if (g.d_latent() != 1)
    throw SpecError("delta_sweep needs d_U = 1; use general checks");
  const SeriesId u = g.latent(0);
  if (g.self_lags(u).empty()) throw SpecError("latent series has no self-lags");
  std::vector<SeriesId> anchors;
  for (int k = 0; k < g.d_observed(); ++k)
    if (!g.lags(g.observed(k), u).empty()) anchors.push_back(g.observed(k));
  if (anchors.empty())
    throw SpecError("no edge from the latent series into any observed series");
  if (opt.delta_hi < opt.delta_lo) return {};

  const std::int64_t nd = opt.delta_hi - opt.delta_lo + 1;
  const std::int64_t tasks = nd * static_cast<std::int64_t>(anchors.size());
  std::vector<std::optional<SweepResult>> slots(static_cast<std::size_t>(tasks));
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t task = 0; task < tasks; ++task) {
    const std::int64_t delta = opt.delta_lo + task / static_cast<std::int64_t>(anchors.size());
    const SeriesId anchor = anchors[static_cast<std::size_t>(task % static_cast<std::int64_t>(anchors.size()))];
    try {
      auto [B, F] = construct_bu_fobs(g, anchor, delta, y);
      Certificate cert;
      cert.B_U = B;
      cert.F_obs = F;
      cert.delta = delta;
      cert.anchor = anchor;
      const auto C = build_c(g, y, F);
      CheckOptions topt;
      topt.check_upsilon = false;
      topt.limits = opt.limits;
      auto early = check_identification_conditions(g, y, B, F, {}, C, topt);
      if (!find_check(early, "1")->pass || !find_check(early, "2b")->pass ||
          !find_check(early, "3")->pass)
        continue;
      assign_taus(g, y, cert, opt.tau_mode, opt.limits);
      if (!check_conditions_c(g, y, cert).passed()) continue;
      CReport rep;
      EstimatorSpec spec = construct_r(g, y, cert, opt.limits, &rep);
      cert.checks = check_identification_conditions(g, y, B, F, spec.R, spec.C, topt);
      for (auto& c : cert.checks)
        if (c.name == "2c") c.witness = "holds by the anchor-edge construction";
      cert.checks.insert(cert.checks.end(), rep.checks.begin(), rep.checks.end());
      if (!all_pass(cert.checks)) continue;
      slots[static_cast<std::size_t>(task)] = SweepResult{std::move(cert), std::move(spec)};
    } catch (const SpecError&) {
    }
  }
  std::vector<SweepResult> out;
  for (auto& s : slots)
    if (s) out.push_back(std::move(*s));
  return out;
}

std::optional<std::size_t> preferred_result(const std::vector<SweepResult>& rs) {
  std::optional<std::size_t> best;
  auto key = [&](std::size_t i) {
    const auto& c = rs[i].certificate;
    return std::make_tuple(rs[i].spec.max_lag_span(), std::abs(c.delta), c.delta,
                           c.anchor.index);
  };
  for (std::size_t i = 0; i < rs.size(); ++i)
    if (!best || key(i) < key(*best)) best = i;
  return best;
}

}  // namespace svarid
