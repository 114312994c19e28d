#pragma once

#include <vector>

#include "dblrot/interval_union.hpp"
#include "dblrot/torus.hpp"

namespace dblrot {

// Finite unions of axis aligned half open boxes on the k-torus.
//
// Stored boxes are pairwise disjoint and none of their spans wraps through
// 0; wrapping input is split on construction. Disjointness makes measure a
// plain sum and keeps symmetric differences exact: all computations reduce
// to a cut grid whose cell boundaries align with every box face.

struct Span {
  double lo;
  double hi;  // half open, no wrap
  double length() const { return hi - lo; }
};

struct Box {
  std::array<Span, kMaxDim> s{};
  double volume(int dim) const {
    double v = 1.0;
    for (int i = 0; i < dim; ++i) v *= s[static_cast<size_t>(i)].length();
    return v;
  }
};

class BoxUnion {
 public:
  explicit BoxUnion(int dim = 1);

  // raw spans may wrap (lo > hi); overlapping input is re-cut into
  // disjoint cells. Throws capacity_error if the cut grid explodes.
  static BoxUnion from_boxes(int dim, const std::vector<Box>& raw);
  // product of 1D sets, one factor per axis; boxes come out disjoint
  static BoxUnion product(const std::vector<IntervalUnion>& factors);
  static BoxUnion full(int dim);

  int dim() const { return dim_; }
  const std::vector<Box>& boxes() const { return boxes_; }
  bool empty() const { return boxes_.empty(); }
  double measure() const { return measure_; }
  bool contains(const TorusPoint& p) const;
  BoxUnion translated(const TranslationVector& u) const;

 private:
  int dim_;
  std::vector<Box> boxes_;
  double measure_ = 0.0;

  void set_boxes(std::vector<Box> disjoint);
};

double intersection_measure(const BoxUnion& a, const BoxUnion& b);
double symm_diff_measure(const BoxUnion& a, const BoxUnion& b);

}  // namespace dblrot
