#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "dblrot/errors.hpp"

namespace dblrot {

// Points and translation vectors on the flat torus (R/Z)^k. Coordinates are
// kept in [0,1) and re-wrapped after every arithmetic step so no drift can
// accumulate over long orbits. Dimension is a runtime value; storage is a
// fixed inline array to keep orbit loops allocation free.

constexpr int kMaxDim = 8;

// Reduce a real to its fractional part in [0,1). x - floor(x) can round to
// exactly 1.0 for tiny negative x, and that case must land on 0.
inline double wrap_unit(double x) {
  double r = x - std::floor(x);
  return (r >= 1.0) ? 0.0 : r;
}

// Circle distance between two coordinates already in [0,1).
inline double circle_dist(double a, double b) {
  double d = std::fabs(a - b);
  return d > 0.5 ? 1.0 - d : d;
}

struct Vec {
  std::array<double, kMaxDim> c{};
  int k = 1;

  Vec() = default;
  Vec(std::initializer_list<double> xs) : k(static_cast<int>(xs.size())) {
    if (k < 1 || k > kMaxDim)
      throw invalid_input_error("torus dimension out of range");
    int i = 0;
    for (double x : xs) c[i++] = x;
  }
  static Vec zero(int dim) {
    Vec v;
    v.k = dim;
    if (dim < 1 || dim > kMaxDim)
      throw invalid_input_error("torus dimension out of range");
    return v;
  }

  double& operator[](int i) { return c[static_cast<size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<size_t>(i)]; }
  int dim() const { return k; }

  bool operator==(const Vec& o) const {
    if (k != o.k) return false;
    for (int i = 0; i < k; ++i)
      if (c[static_cast<size_t>(i)] != o.c[static_cast<size_t>(i)]) return false;
    return true;
  }
};

// The two roles share representation; the aliases keep signatures readable.
using TorusPoint = Vec;
using TranslationVector = Vec;

// Wrap every coordinate into [0,1). Rejects non finite input.
TorusPoint wrap(const Vec& raw);
TorusPoint wrap(std::initializer_list<double> raw);

// p + u, wrapped.
TorusPoint translate(const TorusPoint& p, const TranslationVector& u);

// Coordinatewise p - q mod 1, so translate(q, diff(p, q)) == p exactly.
TorusPoint diff(const TorusPoint& p, const TorusPoint& q);

// Flat product metric: l2 norm of per coordinate circle distances.
// Bounded by sqrt(k)/2.
double torus_dist(const TorusPoint& p, const TorusPoint& q);

// Distance to the zero point, the radial variable of displacement profiles.
double dist_to_zero(const Vec& p);

bool is_zero(const Vec& v);

}  // namespace dblrot
