#pragma once

#include <memory>
#include <vector>

#include "dblrot/histogram.hpp"
#include "dblrot/rng.hpp"
#include "dblrot/sets.hpp"

namespace dblrot {

// The random dynamical system x -> f(x) + w with f(x) = x + v on A and
// the identity elsewhere, driven by i.i.d. uniform torus noise w.
//
// Noise convention used throughout: a run owns one NoiseStream; the step
// noise w_i for i = 1..n is vector_at(i, k) on the substream tagged
// kTagNoise, and initial conditions draw from kTagInit. Forward orbits
// consume w_1, w_2, ... in order; reversed compositions apply the same
// values starting from w_n down to w_1. Random access to the stream is
// what lets the reversed variant reuse a noise prefix without storing it.

constexpr uint64_t kTagInit = 1;
constexpr uint64_t kTagNoise = 2;

struct SystemConfig {
  int dim = 1;
  std::shared_ptr<const SetRep> set;
  TranslationVector v;
  double set_measure = 0.0;
  // a cheap grid scan found a near-zero displacement away from 0, so the
  // asymmetry assumption is suspect and difference statistics may degenerate
  bool symmetry_warning = false;

  static SystemConfig make(SetRep A, TranslationVector v);
  // default jump: sqrt(2)-1 in 1D, (sqrt(2)-1, sqrt(3)-1) in 2D; rational
  // independence is a modeling convention, unverifiable in floating point
  static TranslationVector default_v(int dim);
};

TorusPoint apply_f(const SystemConfig& cfg, const TorusPoint& x);

// x_0 = x, x_i = wrap(apply_f(x_{i-1}) + w_i); returns all n+1 points.
std::vector<TorusPoint> forward_orbit(const SystemConfig& cfg,
                                      const TorusPoint& x, uint64_t n,
                                      NoiseStream noise);

// Coupled pair driven by identical noise. The difference z_n = x_n - y_n
// only ever moves by +-v, so it is stored as the lattice index m_n with
// z_n = z_0 + m_n v mod 1.
struct TwoPointTrace {
  TorusPoint x0, y0;
  TranslationVector z0;
  TranslationVector v;
  std::vector<double> dist;   // dist[i] = torus_dist(x_i, y_i), i = 0..n
  std::vector<int64_t> m;     // m[i] lattice index, m[0] = 0
  Histogram occupancy;        // of z_i over i = 1..n, normalized
  double zero_bin_mass = 0.0; // occupancy mass of the bin containing 0
};

TwoPointTrace two_point_orbit(const SystemConfig& cfg, const TorusPoint& x,
                              const TorusPoint& y, uint64_t n,
                              NoiseStream noise, int occupancy_bins = 64);

struct ParticleEnsemble {
  int dim = 1;
  std::vector<TorusPoint> pts;  // uniform weights 1/M
  size_t size() const { return pts.size(); }
};

// Jittered grid sample: strata are the cells of the largest c^k grid that
// fits in count; leftover particles are plain uniform draws.
ParticleEnsemble stratified_ensemble(int dim, size_t count,
                                     NoiseStream noise);

// Doubling checkpoints 1, 2, 4, ... plus n itself (and optionally 0), the
// default recording schedule wherever one is not given explicitly.
std::vector<uint64_t> geometric_schedule(uint64_t n, bool include_zero);

struct EnsembleSeries {
  std::vector<uint64_t> steps;
  std::vector<double> d_values;  // mean pairwise distance functional
  ParticleEnsemble final_state;
};

// Pushes a stratified sample through the forward composition, recording
// the D functional at each checkpoint (checkpoints are sorted, deduped,
// clamped to [0, n]; empty means a geometric schedule).
EnsembleSeries ensemble_forward(const SystemConfig& cfg, size_t count,
                                uint64_t n, NoiseStream noise,
                                std::vector<uint64_t> checkpoints = {});

// Same initial sample and noise values, composed in reversed order
// (f_{w_n} applied first). Fixed n snapshot only: the reversed composition
// admits no incremental update from the left.
ParticleEnsemble reversed_ensemble(const SystemConfig& cfg, size_t count,
                                   uint64_t n, NoiseStream noise);

// Exact image of the full circle under the reversed composition,
// dimension 1 only. Throws capacity_error when the arc count passes the
// cap; the message reports how far the computation got.
IntervalUnion reversed_image_exact(const SystemConfig& cfg, uint64_t n,
                                   NoiseStream noise,
                                   size_t component_cap = 1000000);

struct AttractorCheckpoint {
  uint64_t n = 0;
  IntervalUnion image;
  int components = 0;
  double measure = 0.0;
  double largest_component = 0.0;
  double largest_gap = 0.0;
};

struct AttractorReport {
  std::vector<AttractorCheckpoint> checkpoints;
};

// Exact images at geometric checkpoints (or a caller schedule), each
// recomputed from scratch. Capacity errors propagate.
AttractorReport attractor_report(const SystemConfig& cfg, uint64_t n_max,
                                 NoiseStream noise,
                                 std::vector<uint64_t> schedule = {},
                                 size_t component_cap = 1000000);

// Circular geometric median by candidate scan over particle positions,
// dimension 1 only: robust location estimate for a near-collapsed cloud.
TorusPoint estimate_limit_point(const ParticleEnsemble& ensemble);

}  // namespace dblrot
