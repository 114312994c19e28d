#include "dblrot/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace dblrot {

Histogram Histogram::zeros(int dim, int bins_per_axis) {
  if (dim < 1 || dim > kMaxDim)
    throw invalid_input_error("histogram dimension out of range");
  if (bins_per_axis < 1)
    throw invalid_input_error("histogram needs at least one bin per axis");
  Histogram h;
  h.dim = dim;
  h.bins_per_axis = bins_per_axis;
  size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= static_cast<size_t>(bins_per_axis);
  h.mass.assign(total, 0.0);
  return h;
}

size_t Histogram::index_of(const TorusPoint& p) const {
  if (p.dim() != dim)
    throw invalid_input_error("dimension mismatch in histogram");
  size_t idx = 0;
  for (int i = 0; i < dim; ++i) {
    auto b = static_cast<size_t>(p[i] * bins_per_axis);
    if (b >= static_cast<size_t>(bins_per_axis))
      b = static_cast<size_t>(bins_per_axis) - 1;  // p[i] just below 1
    idx = idx * static_cast<size_t>(bins_per_axis) + b;
  }
  return idx;
}

void Histogram::add(const TorusPoint& p, double weight) {
  mass[index_of(p)] += weight;
}

double Histogram::total() const {
  double t = 0.0;
  for (double m : mass) t += m;
  return t;
}

void Histogram::normalize() {
  double t = total();
  if (t <= 0.0) return;
  for (double& m : mass) m /= t;
}

double histogram_distance(const Histogram& a, const Histogram& b,
                          DistKind kind) {
  if (a.dim != b.dim || a.bins_per_axis != b.bins_per_axis)
    throw invalid_input_error("histogram layouts do not match");
  if (kind == DistKind::ks && a.dim != 1)
    throw invalid_input_error("ks distance is defined for 1D histograms");
  double ta = a.total(), tb = b.total();
  if (ta <= 0.0 || tb <= 0.0)
    throw invalid_input_error("histogram distance needs positive mass");
  if (kind == DistKind::tv) {
    double s = 0.0;
    for (size_t i = 0; i < a.mass.size(); ++i)
      s += std::fabs(a.mass[i] / ta - b.mass[i] / tb);
    return 0.5 * s;
  }
  double ca = 0.0, cb = 0.0, d = 0.0;
  for (size_t i = 0; i < a.mass.size(); ++i) {
    ca += a.mass[i] / ta;
    cb += b.mass[i] / tb;
    d = std::max(d, std::fabs(ca - cb));
  }
  return d;
}

double d_functional_naive(const ParticleEnsemble& ensemble) {
  const size_t m = ensemble.size();
  if (m == 0) throw invalid_input_error("empty ensemble");
  double s = 0.0;
  for (size_t i = 0; i < m; ++i)
    for (size_t j = i + 1; j < m; ++j)
      s += torus_dist(ensemble.pts[i], ensemble.pts[j]);
  return 2.0 * s / (static_cast<double>(m) * static_cast<double>(m));
}

double d_functional(const ParticleEnsemble& ensemble) {
  const size_t m = ensemble.size();
  if (m == 0) throw invalid_input_error("empty ensemble");
  if (ensemble.dim != 1) return d_functional_naive(ensemble);
  if (m == 1) return 0.0;

  // Sort the positions and duplicate them shifted by one turn. For each
  // anchor i, the other points sit at ext[i+1 .. i+m-1]; those with gap
  // at most half a turn contribute the gap itself, the rest contribute
  // one minus the gap. Each unordered pair is visited twice (once per
  // orientation) and contributes its circle distance both times, so the
  // accumulated sum is exactly the full ordered pair sum.
  std::vector<double> ext;
  ext.reserve(2 * m);
  for (const TorusPoint& p : ensemble.pts) ext.push_back(p[0]);
  std::sort(ext.begin(), ext.begin() + static_cast<long>(m));
  for (size_t i = 0; i < m; ++i) ext.push_back(ext[i] + 1.0);
  std::vector<double> prefix(2 * m + 1, 0.0);
  for (size_t i = 0; i < 2 * m; ++i) prefix[i + 1] = prefix[i] + ext[i];

  double s = 0.0;
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
    // both are sums of nonnegative distances; prefix cancellation can
    // undershoot by an ulp and must not leak a negative total
    s += std::max(0.0, near_sum) + std::max(0.0, far_sum);
  }
  return s / (static_cast<double>(m) * static_cast<double>(m));
}

double sync_fraction(const TwoPointTrace& trace, double delta, uint64_t n) {
  if (delta <= 0.0) throw invalid_input_error("delta must be positive");
  if (n + 1 > trace.dist.size())
    throw invalid_input_error("trace shorter than requested horizon");
  if (n == 0) return 0.0;
  uint64_t hits = 0;
  for (uint64_t i = 1; i <= n; ++i)
    if (trace.dist[i] < delta) ++hits;
  return static_cast<double>(hits) / static_cast<double>(n);
}

double cesaro_distance(const TwoPointTrace& trace, uint64_t n) {
  if (n + 1 > trace.dist.size())
    throw invalid_input_error("trace shorter than requested horizon");
  if (n == 0) return 0.0;
  double s = 0.0;
  for (uint64_t i = 1; i <= n; ++i) s += trace.dist[i];
  return s / static_cast<double>(n);
}

}  // namespace dblrot
