#pragma once

#include <random>

#include "svarid/experiments.hpp"
#include "svarid/svar.hpp"

namespace svarid::testing {

inline Vertex V(int s, std::int64_t t) { return {SeriesId{s}, t}; }

// Scalar AR(1) with coefficient a and unit noise, as one observed series.
inline SvarParams scalar_ar1(double a, double var = 1.0) {
  LagStructure g(0, 1);
  g.add_edge(SeriesId{0}, SeriesId{0}, 1);
  auto p = SvarParams::zeros(g);
  p.set(1, SeriesId{0}, SeriesId{0}, a);
  p.noise_var(0) = var;
  return p;
}

inline SvarParams stable_draw(const LagStructure& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto p = draw_stable_params(g, rng);
  if (!p) throw std::runtime_error("no stable draw");
  return *p;
}

}  // namespace svarid::testing
