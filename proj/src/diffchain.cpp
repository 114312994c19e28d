#include "dblrot/diffchain.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "dblrot/errors.hpp"
#include "dblrot/rds.hpp"  // the shared noise stream tag convention

namespace dblrot {

LatticePhi::LatticePhi(std::shared_ptr<const SetRep> set, TorusPoint z0,
                       TranslationVector v)
    : z0_(wrap(z0)), v_(wrap(v)) {
  if (!set) throw invalid_input_error("lattice phi needs a set");
  if (set_dim(*set) != z0_.dim() || v_.dim() != z0_.dim())
    throw invalid_input_error("lattice phi dimension mismatch");
  fn_ = [s = std::move(set)](const TorusPoint& z) { return phi(*s, z); };
}

LatticePhi::LatticePhi(std::function<double(const TorusPoint&)> fn,
                       TorusPoint z0, TranslationVector v)
    : fn_(std::move(fn)), z0_(wrap(z0)), v_(wrap(v)) {
  if (v_.dim() != z0_.dim())
    throw invalid_input_error("lattice phi dimension mismatch");
  if (!fn_) throw invalid_input_error("lattice phi needs a function");
}

TorusPoint LatticePhi::site(int64_t m) const {
  Vec z = Vec::zero(z0_.dim());
  double md = static_cast<double>(m);
  for (int i = 0; i < z0_.dim(); ++i)
    z[i] = wrap_unit(z0_[i] + md * v_[i]);
  return z;
}

double LatticePhi::at(int64_t m) {
  auto it = cache_.find(m);
  if (it != cache_.end()) return it->second;
  double p = fn_(site(m));
  const double slack = 1e-12;
  if (!(p >= -slack && p <= 1.0 + slack))
    throw invalid_probability_error("displacement value " + std::to_string(p) +
                                    " at lattice index " + std::to_string(m) +
                                    " is not a probability");
  p = std::min(1.0, std::max(0.0, p));
  cache_.emplace(m, p);
  return p;
}

ChainOrbit chain_orbit(LatticePhi& provider, uint64_t n, NoiseStream noise,
                       int occupancy_bins, bool record_series) {
  if (n < 1) throw invalid_input_error("chain length must be at least 1");
  if (occupancy_bins < 1)
    throw invalid_input_error("occupancy needs at least one bin");
  NoiseSource src(noise.sub(kTagNoise));

  ChainOrbit orbit;
  orbit.z0 = provider.z0();
  orbit.v = provider.v();
  orbit.length = n;
  orbit.occupation = Histogram::zeros(provider.dim(), occupancy_bins);
  if (record_series) {
    orbit.m_series.reserve(n + 1);
    orbit.m_series.push_back(0);
  }

  // per site cache of (phi, flat bin) so the hot loop does one hash lookup
  struct SiteInfo {
    double phi;
    size_t bin;
  };
  std::unordered_map<int64_t, SiteInfo> info;
  auto lookup = [&](int64_t m) -> const SiteInfo& {
    auto it = info.find(m);
    if (it == info.end()) {
      SiteInfo si{provider.at(m), orbit.occupation.index_of(provider.site(m))};
      it = info.emplace(m, si).first;
    }
    return it->second;
  };

  int64_t m = 0;
  for (uint64_t i = 1; i <= n; ++i) {
    const SiteInfo& si = lookup(m);
    double u = src.uniform_at(i);
    if (u < 0.5 * si.phi) {
      ++m;
      ++orbit.plus_moves;
    } else if (u < si.phi) {
      --m;
      ++orbit.minus_moves;
    } else {
      ++orbit.holds;
    }
    orbit.occupation.add_index(lookup(m).bin, 1.0);
    if (record_series) orbit.m_series.push_back(m);
  }
  orbit.final_m = m;
  orbit.occupation.normalize();
  orbit.zero_bin_mass = orbit.occupation.mass[0];
  return orbit;
}

namespace {

// geometric sojourn by inverse transform, success probability p; values
// above `remaining` all act the same before the horizon, so they are
// returned as remaining+1 to keep integers small
uint64_t geometric_sojourn(double p, double s, uint64_t remaining) {
  if (p >= 1.0) return 1;
  double td = std::floor(std::log1p(-s) / std::log1p(-p)) + 1.0;
  if (!(td >= 1.0)) td = 1.0;
  if (!(td <= static_cast<double>(remaining))) return remaining + 1;
  return static_cast<uint64_t>(td);
}

}  // namespace

std::pair<ChainOrbit, WalkRealization> slowed_orbit(LatticePhi& provider,
                                                    uint64_t n,
                                                    NoiseStream noise,
                                                    int occupancy_bins,
                                                    bool record_series) {
  if (n < 1) throw invalid_input_error("horizon must be at least 1");
  if (occupancy_bins < 1)
    throw invalid_input_error("occupancy needs at least one bin");
  NoiseSource src(noise.sub(kTagNoise));

  ChainOrbit orbit;
  orbit.z0 = provider.z0();
  orbit.v = provider.v();
  orbit.length = n;
  orbit.occupation = Histogram::zeros(provider.dim(), occupancy_bins);
  if (record_series) orbit.m_series.reserve(n + 1);

  WalkRealization walk;
  walk.horizon = n;
  walk.c.push_back(0);

  int64_t c_cur = 0;
  uint64_t time = 0;  // completed time, the partial sum of sojourns so far
  while (time <= n) {
    double p = provider.at(c_cur);
    uint64_t j = walk.t.size() + 1;
    uint64_t remaining = n - time;
    uint64_t tj;
    if (p <= 0.0) {
      // infinite holding mean: frozen for the rest of the horizon
      tj = remaining + 1;
      if (!is_zero(provider.site(c_cur))) walk.stall_warning = true;
    } else {
      tj = geometric_sojourn(p, src.uniform_at(2 * j + 1), remaining);
    }
    walk.t.push_back(tj);

    // site c_cur holds Z_t for t in [time, time+tj-1]; occupation counts
    // t in [1, n], the recorded series also includes t = 0
    uint64_t lo = std::max<uint64_t>(time, 1);
    uint64_t hi = std::min<uint64_t>(time + tj - 1, n);
    if (hi >= lo)
      orbit.occupation.add_index(
          orbit.occupation.index_of(provider.site(c_cur)),
          static_cast<double>(hi - lo + 1));
    if (record_series)
      for (uint64_t s = time; s <= hi; ++s) orbit.m_series.push_back(c_cur);

    if (tj > remaining) break;  // sojourn crosses the horizon, no more moves
    time += tj;
    ++walk.j_n;
    double ud = src.uniform_at(2 * j);
    c_cur += ud < 0.5 ? 1 : -1;
    walk.c.push_back(c_cur);
    if (ud < 0.5)
      ++orbit.plus_moves;
    else
      ++orbit.minus_moves;
  }
  orbit.holds = n - orbit.plus_moves - orbit.minus_moves;
  orbit.final_m = c_cur;
  orbit.occupation.normalize();
  orbit.zero_bin_mass = orbit.occupation.mass[0];
  return {std::move(orbit), std::move(walk)};
}

namespace {

int64_t sample_chain_final_m(LatticePhi& provider, uint64_t n,
                             NoiseStream noise) {
  NoiseSource src(noise.sub(kTagNoise));
  int64_t m = 0;
  for (uint64_t i = 1; i <= n; ++i) {
    double p = provider.at(m);
    double u = src.uniform_at(i);
    if (u < 0.5 * p)
      ++m;
    else if (u < p)
      --m;
  }
  return m;
}

// same draw layout as slowed_orbit (direction at 2j, holding at 2j+1) so
// both produce identical paths from identical streams; mult inflates the
// holding means, the corruption hook for the negative control
int64_t sample_slowed_final_m(LatticePhi& provider, uint64_t n,
                              NoiseStream noise, double mult) {
  NoiseSource src(noise.sub(kTagNoise));
  int64_t c = 0;
  uint64_t time = 0;
  uint64_t j = 0;
  while (time <= n) {
    double p = std::min(1.0, provider.at(c) / mult);
    uint64_t remaining = n - time;
    if (p <= 0.0) break;  // frozen until the horizon
    ++j;
    uint64_t tj = geometric_sojourn(p, src.uniform_at(2 * j + 1), remaining);
    if (tj > remaining) break;
    time += tj;
    c += src.uniform_at(2 * j) < 0.5 ? 1 : -1;
  }
  return c;
}

}  // namespace

LawTestResult law_equivalence_test(LatticePhi& provider, uint64_t n,
                                   uint64_t trials, NoiseStream noise,
                                   double holding_mean_multiplier) {
  if (n > 60)
    throw invalid_input_error(
        "lattice horizon too large for an exact reachable-state comparison");
  if (trials < 10000)
    throw invalid_input_error("need at least 10000 trials per sampler");
  if (!(holding_mean_multiplier > 0.0))
    throw invalid_input_error("holding mean multiplier must be positive");

  constexpr uint64_t kTagChainTrial = 3;
  constexpr uint64_t kTagSlowedTrial = 4;
  NoiseStream chain_base = noise.sub(kTagChainTrial);
  NoiseStream slowed_base = noise.sub(kTagSlowedTrial);

  LawTestResult res;
  res.m_min = -static_cast<int64_t>(n);
  size_t states = 2 * static_cast<size_t>(n) + 1;
  res.chain_counts.assign(states, 0);
  res.slowed_counts.assign(states, 0);

  for (uint64_t t = 0; t < trials; ++t) {
    int64_t mc = n == 0 ? 0 : sample_chain_final_m(provider, n, chain_base.sub(t));
    int64_t ms = n == 0 ? 0
                        : sample_slowed_final_m(provider, n, slowed_base.sub(t),
                                                holding_mean_multiplier);
    res.chain_counts[static_cast<size_t>(mc - res.m_min)] += 1;
    res.slowed_counts[static_cast<size_t>(ms - res.m_min)] += 1;
  }

  // both samplers concentrated on one identical state carries no signal;
  // report a null statistic instead of failing to pool
  size_t occupied = 0, last = 0;
  for (size_t i = 0; i < states; ++i)
    if (res.chain_counts[i] + res.slowed_counts[i] > 0) {
      ++occupied;
      last = i;
    }
  if (occupied == 1 && res.chain_counts[last] == res.slowed_counts[last]) {
    res.chi = ChiSquareResult{0.0, 0, 1.0, 1};
    return res;
  }

  std::vector<std::pair<uint64_t, uint64_t>> cells;
  cells.reserve(states);
  for (size_t i = 0; i < states; ++i)
    cells.emplace_back(res.chain_counts[i], res.slowed_counts[i]);
  res.chi = pooled_two_sample_chi_square(cells);
  return res;
}

Histogram predicted_density(const DisplacementProfile& profile,
                            int bins_per_axis, double cutoff) {
  if (profile.verdict != Verdict::converges)
    throw not_integrable_error(
        "no stationary density: the profile classifies as " +
        std::string(verdict_name(profile.verdict)));
  if (!profile.set) throw invalid_input_error("profile carries no set");
  int k = profile.dim;
  if (k != 1 && k != 2)
    throw invalid_input_error("predicted density covers dimensions 1 and 2");
  if (bins_per_axis < 1) throw invalid_input_error("need at least one bin");
  if (cutoff <= 0.0) cutoff = k == 1 ? std::ldexp(1.0, -12) : 0.004;
  if (cutoff >= 1.0 / bins_per_axis)
    throw invalid_input_error("cutoff ball must fit inside the corner bins");

  // analytic mass of the cutoff ball from the power law fit, kept finite
  // by clamping the exponent strictly below the dimension
  double alpha = std::min(profile.fit.alpha, k - 1e-6);
  double c = profile.fit.c;
  double ball_mass =
      k == 1 ? 2.0 * std::pow(cutoff, 1.0 - alpha) / (c * (1.0 - alpha))
             : 2.0 * 3.141592653589793238462643 *
                   std::pow(cutoff, 2.0 - alpha) / (c * (2.0 - alpha));

  Histogram hist = Histogram::zeros(k, bins_per_axis);
  const int sub = k == 1 ? 256 : 32;
  const double step = 1.0 / (static_cast<double>(bins_per_axis) * sub);
  double cell_vol = 1.0;
  for (int i = 0; i < k; ++i) cell_vol *= step;

  const int total_per_axis = bins_per_axis * sub;
  std::vector<int> idx(static_cast<size_t>(k), 0);
  size_t cells = 1;
  for (int i = 0; i < k; ++i) cells *= static_cast<size_t>(total_per_axis);
  for (size_t cell = 0; cell < cells; ++cell) {
    Vec eps = Vec::zero(k);
    size_t bin = 0;
    for (int i = 0; i < k; ++i) {
      int a = idx[static_cast<size_t>(i)];
      eps[i] = (a + 0.5) * step;
      bin = bin * static_cast<size_t>(bins_per_axis) +
            static_cast<size_t>(a / sub);
    }
    if (dist_to_zero(eps) > cutoff) {
      double p = phi(*profile.set, eps);
      if (p <= 0.0)
        throw invalid_probability_error(
            "displacement vanishes away from 0; 1/phi is undefined there");
      hist.add_index(bin, cell_vol / p);
    }
    for (int i = k - 1; i >= 0; --i) {
      size_t j = static_cast<size_t>(i);
      if (++idx[j] < total_per_axis) break;
      idx[j] = 0;
    }
  }

  // the ball splits evenly over the bins touching the origin, one corner
  // of the index cube per axis choice (a single bin covers them all)
  std::vector<size_t> corners;
  int choices = 1 << k;
  for (int mask = 0; mask < choices; ++mask) {
    size_t bin = 0;
    for (int i = 0; i < k; ++i) {
      int a = (mask >> i) & 1 ? bins_per_axis - 1 : 0;
      bin = bin * static_cast<size_t>(bins_per_axis) + static_cast<size_t>(a);
    }
    corners.push_back(bin);
  }
  std::sort(corners.begin(), corners.end());
  corners.erase(std::unique(corners.begin(), corners.end()), corners.end());
  for (size_t bin : corners)
    hist.add_index(bin, ball_mass / static_cast<double>(corners.size()));

  hist.normalize();
  return hist;
}

double occupation_compare(const ChainOrbit& orbit, const Histogram& predicted,
                          bool exclude_zero_bin) {
  if (orbit.occupation.dim != predicted.dim ||
      orbit.occupation.bins_per_axis != predicted.bins_per_axis)
    throw invalid_input_error("occupation and prediction bin layouts differ");
  if (!exclude_zero_bin)
    return histogram_distance(orbit.occupation, predicted, DistKind::tv);
  Histogram a = orbit.occupation, b = predicted;
  a.mass[0] = 0.0;
  b.mass[0] = 0.0;
  a.normalize();
  b.normalize();
  return histogram_distance(a, b, DistKind::tv);
}

}  // namespace dblrot
