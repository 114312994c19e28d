#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "dblrot/displacement.hpp"
#include "dblrot/histogram.hpp"
#include "dblrot/rng.hpp"
#include "dblrot/sets.hpp"
#include "dblrot/stats.hpp"

namespace dblrot {

// The reduced difference process: a Markov chain on the coset
// {z0 + m v mod 1 : m integer} that moves by +v or -v, each with
// probability phi(z)/2, and holds otherwise. States are tracked by the
// integer lattice index m, never by accumulated reals, so distinct states
// stay exactly distinguishable.

// Displacement values along the lattice, memoized by index. Can wrap an
// arbitrary function instead of a set (test hooks, constant-phi controls).
class LatticePhi {
 public:
  LatticePhi(std::shared_ptr<const SetRep> set, TorusPoint z0,
             TranslationVector v);
  LatticePhi(std::function<double(const TorusPoint&)> fn, TorusPoint z0,
             TranslationVector v);

  int dim() const { return z0_.dim(); }
  const TorusPoint& z0() const { return z0_; }
  const TranslationVector& v() const { return v_; }
  TorusPoint site(int64_t m) const;  // wrap(z0 + m v)
  // phi at site m, validated to lie in [0,1] up to rounding slack and
  // clamped into it; anything further out raises invalid_probability_error
  double at(int64_t m);

 private:
  std::function<double(const TorusPoint&)> fn_;
  TorusPoint z0_;
  TranslationVector v_;
  std::unordered_map<int64_t, double> cache_;
};

struct ChainOrbit {
  TorusPoint z0;
  TranslationVector v;
  uint64_t length = 0;
  std::vector<int64_t> m_series;  // m_0..m_N, only when recording is on
  Histogram occupation;           // of z_n over n = 1..N, normalized
  uint64_t plus_moves = 0, minus_moves = 0, holds = 0;
  double zero_bin_mass = 0.0;  // occupation mass of the bin containing 0
  int64_t final_m = 0;
};

// Direct simulation: one uniform per step decides {+v, -v, hold} by
// inverse transform with cuts at phi/2 and phi.
ChainOrbit chain_orbit(LatticePhi& provider, uint64_t n, NoiseStream noise,
                       int occupancy_bins = 64, bool record_series = false);

// Underlying unslowed +-1 walk plus sojourn times. t[j-1] is the time
// spent at site c[j-1] (so jumps of the slowed process happen at the
// partial sums of t), drawn geometric with success probability
// phi(site(c[j-1])). A draw that overshoots the horizon is stored
// truncated as remaining+1; with that convention
// t_1+...+t_{J(N)} <= N < t_1+...+t_{J(N)+1} always holds.
struct WalkRealization {
  std::vector<int64_t> c;   // c[0] = 0, |c[j+1]-c[j]| = 1
  std::vector<uint64_t> t;  // t[j-1] = sojourn at site c[j-1], >= 1
  uint64_t horizon = 0;
  uint64_t j_n = 0;  // J(N): completed sojourns within the horizon
  // phi vanished at a site other than exact 0; the orbit is frozen there
  // for the rest of the horizon
  bool stall_warning = false;
};

// Slowed walk construction of the same law: run the +-1 walk and hold at
// each site for an O(1)-sampled geometric time (the holding mean near
// phi = 0 is unbounded, so Bernoulli looping is not an option). Two
// uniforms per walk step: direction at counter 2j, holding at 2j+1.
std::pair<ChainOrbit, WalkRealization> slowed_orbit(LatticePhi& provider,
                                                    uint64_t n,
                                                    NoiseStream noise,
                                                    int occupancy_bins = 64,
                                                    bool record_series = false);

struct LawTestResult {
  ChiSquareResult chi;
  int64_t m_min = 0;  // counts index 0 corresponds to this lattice index
  std::vector<uint64_t> chain_counts;
  std::vector<uint64_t> slowed_counts;
};

// Draws `trials` independent copies of the lattice index at time n from
// the direct chain and from the slowed construction and compares the two
// empirical laws by pooled chi-square. holding_mean_multiplier inflates
// the slowed holding means by that factor; values != 1 are a deliberate
// corruption used as a negative control.
LawTestResult law_equivalence_test(LatticePhi& provider, uint64_t n,
                                   uint64_t trials, NoiseStream noise,
                                   double holding_mean_multiplier = 1.0);

// Stationary density prediction (1/Z)(1/phi) for an integrable profile,
// binned: each bin is subsampled on a midpoint grid and averages 1/phi
// outside a small cutoff ball at 0; the ball itself contributes the
// analytic power law integral from the exponent fit, split over the bins
// that contain it. cutoff <= 0 picks a dimension-appropriate default.
Histogram predicted_density(const DisplacementProfile& profile,
                            int bins_per_axis, double cutoff = 0.0);

// Total variation between the orbit occupation and a predicted density on
// the same layout. exclude_zero_bin drops the bin containing 0 from both
// sides and renormalizes before comparing; use it for synchronizing
// configurations, where no stationary density exists and the 0 bin soaks
// up a diverging share of time.
double occupation_compare(const ChainOrbit& orbit, const Histogram& predicted,
                          bool exclude_zero_bin = false);

}  // namespace dblrot
