#pragma once

#include <utility>
#include <vector>

#include "dblrot/errors.hpp"

namespace dblrot {

// Finite unions of half open arcs [lo,hi) on the circle R/Z.
//
// Canonical form: arcs sorted by left endpoint, pairwise disjoint, no two
// sharing an endpoint, with one exception: a set that wraps through 0 keeps
// the split pair [x,1), [0,y). That convention means no stored arc wraps,
// so sweeps and binary searches never need modular case analysis. Arcs
// shorter than kMinArc are treated as degenerate and dropped.

constexpr double kMinArc = 1e-15;

struct Arc {
  double lo;
  double hi;  // half open on the right
  double length() const { return hi - lo; }
};

class IntervalUnion {
 public:
  IntervalUnion() = default;  // empty set

  // raw segments (a,b): [a,b) when a < b, wrapping through 0 when a > b.
  // a == b is rejected as ambiguous; use full_circle() for the whole circle.
  static IntervalUnion from_segments(
      const std::vector<std::pair<double, double>>& raw);
  static IntervalUnion full_circle();
  // sort, merge, drop degenerate slivers; pieces must not wrap
  static IntervalUnion canonical(std::vector<Arc> pieces);
  static IntervalUnion single(double a, double b) {
    return from_segments({{a, b}});
  }

  const std::vector<Arc>& arcs() const { return arcs_; }
  bool empty() const { return arcs_.empty(); }
  double measure() const { return measure_; }
  bool contains(double x) const;

  IntervalUnion translated(double u) const;
  IntervalUnion complement() const;

  // Number of connected subsets of the circle (the split pair at 0 counts
  // once), and the longest of them.
  int component_count() const;
  double largest_component() const;
  // Longest arc of the complement; 0 for the full circle.
  double largest_gap() const;
  // Smallest arc or gap length, the scale below which translation by
  // epsilon moves every boundary independently.
  double min_feature() const;

 private:
  std::vector<Arc> arcs_;
  double measure_ = 0.0;

  void canonicalize(std::vector<Arc> pieces);
};

IntervalUnion intersect(const IntervalUnion& a, const IntervalUnion& b);
IntervalUnion unite(const IntervalUnion& a, const IntervalUnion& b);
IntervalUnion subtract(const IntervalUnion& a, const IntervalUnion& b);

// Leb(a cap b) by a single sweep, no allocation.
double intersection_measure(const IntervalUnion& a, const IntervalUnion& b);

// Leb(a symmetric difference b) = m(a) + m(b) - 2 m(a cap b).
double symm_diff_measure(const IntervalUnion& a, const IntervalUnion& b);

// Cantor-like approximant: start from the full circle; at step j remove
// from the middle of each of the 2^(j-1) current arcs an open interval of
// length 8^-j. Depth n leaves 2^n arcs of total measure 5/6 + (1/6) 4^-n.
// All endpoints are dyadic rationals, exact in double arithmetic.
struct CantorSpec {
  int depth = 0;
  IntervalUnion realize() const;
};

IntervalUnion realize_cantor(int depth);

// Membership at arbitrary depth without materializing the union. Walks the
// same midpoint recursion realize_cantor uses, with identical floating
// point expressions, so the two agree bit for bit at any common depth.
bool cantor_contains(double x, int depth);

}  // namespace dblrot
