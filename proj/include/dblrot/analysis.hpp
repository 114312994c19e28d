#pragma once

#include "dblrot/histogram.hpp"
#include "dblrot/rds.hpp"

namespace dblrot {

// Summary functionals over traces and ensembles.

// D(ensemble) = (1/M^2) sum_{i,j} torus_dist(x_i, x_j), the mean pairwise
// distance of the empirical measure. 0 exactly for a Dirac cloud, 1/4 in
// expectation for uniform mass on the circle. The 1D path runs in
// O(M log M) via sorted prefix sums; other dimensions fall back to the
// O(M^2) pair loop.
double d_functional(const ParticleEnsemble& ensemble);
// Reference pair loop, any dimension; the fast path is tested against it.
double d_functional_naive(const ParticleEnsemble& ensemble);

// Fraction of steps 1..N with dist(x_n, y_n) < delta.
double sync_fraction(const TwoPointTrace& trace, double delta, uint64_t n);

// (1/N) sum_{i=1..N} dist(x_i, y_i).
double cesaro_distance(const TwoPointTrace& trace, uint64_t n);

}  // namespace dblrot
