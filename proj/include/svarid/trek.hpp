#pragma once

#include <cstddef>
#include <vector>

#include "svarid/svar.hpp"

namespace svarid {

// left runs from the first endpoint up to the top, right from the top down
// to the second endpoint. Both include the top.
struct Trek {
  std::vector<Vertex> left;
  std::vector<Vertex> right;
  Vertex top() const { return left.back(); }
};

double trek_monomial(const SvarParams& params, const Trek& trek);

// Explicit enumeration of all treks whose top is at most depth steps before
// min(t(v1), t(v2)). Throws once more than max_count treks are produced.
std::vector<Trek> enumerate_treks(const LagStructure& g, const Vertex& v1,
                                  const Vertex& v2, int depth,
                                  std::size_t max_count = 1000000);

// Sum of trek monomials with the same top-time cutoff, via path sums.
double trek_sum_truncated(const SvarParams& params, const Vertex& v1,
                          const Vertex& v2, int depth);

// |Γ_ab - Σ_{q in pa(b) ∪ extra} A_bq Γ_aq|. Extra vertices carry the
// coefficient of their edge into b, which is zero for undeclared edges.
double parent_decomposition_residual(const SvarParams& params, const Vertex& a,
                                     const Vertex& b, const CovarianceTable& cov,
                                     const VertexSet& extra_parents = {});

}  // namespace svarid
