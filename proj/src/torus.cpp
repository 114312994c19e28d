#include "dblrot/torus.hpp"

#include <algorithm>

namespace dblrot {

TorusPoint wrap(const Vec& raw) {
  Vec out = raw;
  for (int i = 0; i < raw.k; ++i) {
    double x = raw[i];
    if (!std::isfinite(x)) throw invalid_input_error("non-finite coordinate");
    out[i] = wrap_unit(x);
  }
  return out;
}

TorusPoint wrap(std::initializer_list<double> raw) { return wrap(Vec(raw)); }

TorusPoint translate(const TorusPoint& p, const TranslationVector& u) {
  if (p.k != u.k) throw invalid_input_error("dimension mismatch in translate");
  Vec out = p;
  for (int i = 0; i < p.k; ++i) out[i] = wrap_unit(p[i] + u[i]);
  return out;
}

TorusPoint diff(const TorusPoint& p, const TorusPoint& q) {
  if (p.k != q.k) throw invalid_input_error("dimension mismatch in diff");
  Vec out = p;
  for (int i = 0; i < p.k; ++i) out[i] = wrap_unit(p[i] - q[i]);
  return out;
}

double torus_dist(const TorusPoint& p, const TorusPoint& q) {
  if (p.k != q.k) throw invalid_input_error("dimension mismatch in torus_dist");
  double s = 0.0;
  for (int i = 0; i < p.k; ++i) {
    double d = circle_dist(p[i], q[i]);
    s += d * d;
  }
  return std::sqrt(s);
}

double dist_to_zero(const Vec& p) {
  double s = 0.0;
  for (int i = 0; i < p.k; ++i) {
    double d = std::min(p[i], 1.0 - p[i]);
    // coordinates sit in [0,1) so d is already the circle distance to 0
    s += d * d;
  }
  return std::sqrt(s);
}

bool is_zero(const Vec& v) {
  for (int i = 0; i < v.k; ++i)
    if (v[i] != 0.0) return false;
  return true;
}

}  // namespace dblrot
