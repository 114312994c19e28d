#include "dblrot/rds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <type_traits>

#include "dblrot/analysis.hpp"
#include "dblrot/displacement.hpp"

namespace dblrot {

TranslationVector SystemConfig::default_v(int dim) {
  // fractional parts of square roots of the first primes
  static const double primes[kMaxDim] = {2, 3, 5, 7, 11, 13, 17, 19};
  Vec v = Vec::zero(dim);
  for (int i = 0; i < dim; ++i) {
    double s = std::sqrt(primes[i]);
    v[i] = s - std::floor(s);
  }
  return v;
}

SystemConfig SystemConfig::make(SetRep A, TranslationVector v) {
  SystemConfig cfg;
  cfg.dim = set_dim(A);
  if (v.dim() != cfg.dim)
    throw invalid_input_error("jump vector dimension does not match the set");
  cfg.v = wrap(v);
  if (is_zero(cfg.v))
    throw invalid_input_error("jump vector must be nonzero");
  cfg.set_measure = dblrot::set_measure(A);
  cfg.set = std::make_shared<const SetRep>(std::move(A));

  // cheap asymmetry scan: a vanishing displacement away from 0 means the
  // set is invariant under some translation and difference statistics
  // will be degenerate along that coset
  int grid = cfg.dim == 1 ? 256 : 24;
  double min_phi = 2.0;
  std::vector<int> idx(static_cast<size_t>(cfg.dim), 0);
  size_t total = 1;
  for (int i = 0; i < cfg.dim; ++i) total *= static_cast<size_t>(grid);
  for (size_t n = 0; n < total; ++n) {
    Vec eps = Vec::zero(cfg.dim);
    for (int i = 0; i < cfg.dim; ++i)
      eps[i] = static_cast<double>(idx[static_cast<size_t>(i)]) / grid;
    if (dist_to_zero(eps) > 0.01)
      min_phi = std::min(min_phi, phi(*cfg.set, eps));
    for (int i = cfg.dim - 1; i >= 0; --i) {
      size_t j = static_cast<size_t>(i);
      if (++idx[j] < grid) break;
      idx[j] = 0;
    }
  }
  cfg.symmetry_warning = min_phi <= 1e-9;
  return cfg;
}

TorusPoint apply_f(const SystemConfig& cfg, const TorusPoint& x) {
  if (x.dim() != cfg.dim)
    throw invalid_input_error("dimension mismatch in apply_f");
  if (!set_contains(*cfg.set, x)) return x;
  return translate(x, cfg.v);
}

std::vector<TorusPoint> forward_orbit(const SystemConfig& cfg,
                                      const TorusPoint& x, uint64_t n,
                                      NoiseStream noise) {
  if (n < 1) throw invalid_input_error("orbit length must be at least 1");
  NoiseSource src(noise.sub(kTagNoise));
  std::vector<TorusPoint> orbit;
  orbit.reserve(n + 1);
  orbit.push_back(wrap(x));
  TorusPoint cur = orbit.back();
  for (uint64_t i = 1; i <= n; ++i) {
    cur = translate(apply_f(cfg, cur), src.vector_at(i, cfg.dim));
    orbit.push_back(cur);
  }
  return orbit;
}

TwoPointTrace two_point_orbit(const SystemConfig& cfg, const TorusPoint& x,
                              const TorusPoint& y, uint64_t n,
                              NoiseStream noise, int occupancy_bins) {
  if (n < 1) throw invalid_input_error("orbit length must be at least 1");
  if (occupancy_bins < 1)
    throw invalid_input_error("occupancy needs at least one bin");
  const int k = cfg.dim;
  NoiseSource src(noise.sub(kTagNoise));

  TwoPointTrace trace;
  trace.x0 = wrap(x);
  trace.y0 = wrap(y);
  trace.v = cfg.v;
  trace.z0 = diff(trace.x0, trace.y0);
  trace.dist.reserve(n + 1);
  trace.m.reserve(n + 1);
  trace.occupancy = Histogram::zeros(k, occupancy_bins);

  TorusPoint xc = trace.x0, yc = trace.y0;
  int64_t m = 0;
  trace.dist.push_back(torus_dist(xc, yc));
  trace.m.push_back(0);
  const SetRep& A = *cfg.set;
  for (uint64_t i = 1; i <= n; ++i) {
    bool ax = set_contains(A, xc);
    bool ay = set_contains(A, yc);
    m += static_cast<int64_t>(ax) - static_cast<int64_t>(ay);
    TranslationVector w = src.vector_at(i, k);
    // identical operation order to forward_orbit, so feeding the same
    // stream through forward_orbit reproduces each leg bitwise
    xc = translate(ax ? translate(xc, cfg.v) : xc, w);
    yc = translate(ay ? translate(yc, cfg.v) : yc, w);
    trace.dist.push_back(torus_dist(xc, yc));
    trace.m.push_back(m);
    trace.occupancy.add(diff(xc, yc));
  }
  trace.occupancy.normalize();
  trace.zero_bin_mass = trace.occupancy.mass[0];
  return trace;
}

ParticleEnsemble stratified_ensemble(int dim, size_t count,
                                     NoiseStream noise) {
  if (count == 0) throw invalid_input_error("ensemble needs particles");
  if (dim < 1 || dim > kMaxDim)
    throw invalid_input_error("ensemble dimension out of range");
  // largest c with c^dim <= count
  size_t c = 1;
  while (true) {
    size_t p = 1;
    bool ok = true;
    for (int i = 0; i < dim; ++i) {
      if (p > count / (c + 1)) {
        ok = false;
        break;
      }
      p *= (c + 1);
    }
    if (!ok || p > count) break;
    ++c;
  }
  size_t cells = 1;
  for (int i = 0; i < dim; ++i) cells *= c;

  NoiseSource src(noise);
  ParticleEnsemble ens;
  ens.dim = dim;
  ens.pts.reserve(count);
  std::vector<size_t> idx(static_cast<size_t>(dim), 0);
  for (size_t n = 0; n < cells; ++n) {
    Vec p = Vec::zero(dim);
    for (int i = 0; i < dim; ++i)
      p[i] = (static_cast<double>(idx[static_cast<size_t>(i)]) +
              src.uniform()) /
             static_cast<double>(c);
    ens.pts.push_back(wrap(p));
    for (int i = dim - 1; i >= 0; --i) {
      size_t j = static_cast<size_t>(i);
      if (++idx[j] < c) break;
      idx[j] = 0;
    }
  }
  for (size_t n = cells; n < count; ++n) ens.pts.push_back(src.vector(dim));
  return ens;
}

namespace {

// one forward map application to every particle, noise vector w shared;
// operation order matches forward_orbit bitwise
void step_ensemble(ParticleEnsemble& ens, const SystemConfig& cfg,
                   const TranslationVector& w) {
  std::visit(
      [&](const auto& A) {
        using T = std::decay_t<decltype(A)>;
        for (TorusPoint& p : ens.pts) {
          bool in;
          if constexpr (std::is_same_v<T, IntervalUnion>)
            in = A.contains(p[0]);
          else
            in = A.contains(p);
          p = translate(in ? translate(p, cfg.v) : p, w);
        }
      },
      *cfg.set);
}

}  // namespace

std::vector<uint64_t> geometric_schedule(uint64_t n, bool include_zero) {
  std::vector<uint64_t> steps;
  if (include_zero) steps.push_back(0);
  for (uint64_t s = 1; s < n; s *= 2) steps.push_back(s);
  if (n >= 1) steps.push_back(n);
  return steps;
}

EnsembleSeries ensemble_forward(const SystemConfig& cfg, size_t count,
                                uint64_t n, NoiseStream noise,
                                std::vector<uint64_t> checkpoints) {
  if (checkpoints.empty()) checkpoints = geometric_schedule(n, true);
  for (uint64_t& s : checkpoints) s = std::min(s, n);
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()),
                    checkpoints.end());

  EnsembleSeries series;
  series.final_state = stratified_ensemble(cfg.dim, count, noise.sub(kTagInit));
  ParticleEnsemble& ens = series.final_state;
  NoiseSource src(noise.sub(kTagNoise));

  size_t next_cp = 0;
  auto record = [&](uint64_t step) {
    while (next_cp < checkpoints.size() && checkpoints[next_cp] == step) {
      series.steps.push_back(step);
      series.d_values.push_back(d_functional(ens));
      ++next_cp;
    }
  };
  record(0);
  for (uint64_t i = 1; i <= n; ++i) {
    step_ensemble(ens, cfg, src.vector_at(i, cfg.dim));
    record(i);
  }
  return series;
}

ParticleEnsemble reversed_ensemble(const SystemConfig& cfg, size_t count,
                                   uint64_t n, NoiseStream noise) {
  if (n < 1) throw invalid_input_error("composition length must be at least 1");
  ParticleEnsemble ens = stratified_ensemble(cfg.dim, count, noise.sub(kTagInit));
  NoiseSource src(noise.sub(kTagNoise));
  // same noise values as the forward run, applied innermost first
  for (uint64_t i = n; i >= 1; --i)
    step_ensemble(ens, cfg, src.vector_at(i, cfg.dim));
  return ens;
}

IntervalUnion reversed_image_exact(const SystemConfig& cfg, uint64_t n,
                                   NoiseStream noise, size_t component_cap) {
  if (cfg.dim != 1 || !std::holds_alternative<IntervalUnion>(*cfg.set))
    throw invalid_input_error("exact image tracking covers dimension 1 only");
  const IntervalUnion& A = std::get<IntervalUnion>(*cfg.set);
  const double v = cfg.v[0];
  NoiseSource src(noise.sub(kTagNoise));

  IntervalUnion S = IntervalUnion::full_circle();
  for (uint64_t i = n; i >= 1; --i) {
    // image of one map: the part inside A jumps by v, the rest stays
    IntervalUnion moved = intersect(S, A).translated(v);
    IntervalUnion kept = subtract(S, A);
    S = unite(moved, kept).translated(src.uniform_at(i));
    if (S.arcs().size() > component_cap)
      throw capacity_error(
          "image component cap exceeded after applying noise index " +
          std::to_string(i) + " of " + std::to_string(n) + ": " +
          std::to_string(S.arcs().size()) + " arcs (partial depth " +
          std::to_string(n - i + 1) + " reached)");
  }
  return S;
}

AttractorReport attractor_report(const SystemConfig& cfg, uint64_t n_max,
                                 NoiseStream noise,
                                 std::vector<uint64_t> schedule,
                                 size_t component_cap) {
  if (n_max < 1) throw invalid_input_error("n_max must be at least 1");
  if (schedule.empty()) schedule = geometric_schedule(n_max, false);
  for (uint64_t& s : schedule) s = std::min(s, n_max);
  std::sort(schedule.begin(), schedule.end());
  schedule.erase(std::unique(schedule.begin(), schedule.end()),
                 schedule.end());

  AttractorReport report;
  for (uint64_t nj : schedule) {
    AttractorCheckpoint cp;
    cp.n = nj;
    // recomputed from scratch: reversed composition grows on the left, so
    // there is no incremental update between checkpoints
    cp.image = reversed_image_exact(cfg, nj, noise, component_cap);
    cp.components = cp.image.component_count();
    cp.measure = cp.image.measure();
    cp.largest_component = cp.image.largest_component();
    cp.largest_gap = cp.image.largest_gap();
    report.checkpoints.push_back(std::move(cp));
  }
  return report;
}

TorusPoint estimate_limit_point(const ParticleEnsemble& ensemble) {
  if (ensemble.size() == 0) throw invalid_input_error("empty ensemble");
  if (ensemble.dim != 1)
    throw invalid_input_error("limit point estimation covers dimension 1");
  const size_t m = ensemble.size();
  if (m == 1) return ensemble.pts[0];

  // objective at each particle position via the same extended prefix sums
  // as the fast D functional; candidates are the particles themselves
  std::vector<double> ext;
  ext.reserve(2 * m);
  for (const TorusPoint& p : ensemble.pts) ext.push_back(p[0]);
  std::sort(ext.begin(), ext.begin() + static_cast<long>(m));
  for (size_t i = 0; i < m; ++i) ext.push_back(ext[i] + 1.0);
  std::vector<double> prefix(2 * m + 1, 0.0);
  for (size_t i = 0; i < 2 * m; ++i) prefix[i + 1] = prefix[i] + ext[i];

  double best = std::numeric_limits<double>::infinity();
  double best_x = ext[0];
  for (size_t i = 0; i < m; ++i) {
    double x = ext[i];
    size_t hi = static_cast<size_t>(
        std::upper_bound(ext.begin() + static_cast<long>(i) + 1,
                         ext.begin() + static_cast<long>(i + m), x + 0.5) -
        ext.begin());
    double near_count = static_cast<double>(hi - i - 1);
    double near_sum = (prefix[hi] - prefix[i + 1]) - x * near_count;
    double far_count = static_cast<double>(i + m - hi);
    double far_sum =
        far_count - ((prefix[i + m] - prefix[hi]) - x * far_count);
    double obj = near_sum + far_sum;
    if (obj < best) {
      best = obj;
      best_x = x;
    }
  }
  return wrap({best_x});
}

}  // namespace dblrot
