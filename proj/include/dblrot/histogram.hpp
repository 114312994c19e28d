#pragma once

#include <vector>

#include "dblrot/torus.hpp"

namespace dblrot {

// Equal width bin mass over the torus, row major across axes. Bin 0 along
// each axis starts at 0, so the origin always sits in flat index 0.
struct Histogram {
  int dim = 1;
  int bins_per_axis = 0;
  std::vector<double> mass;

  static Histogram zeros(int dim, int bins_per_axis);
  size_t index_of(const TorusPoint& p) const;
  void add(const TorusPoint& p, double weight = 1.0);
  void add_index(size_t i, double weight) { mass[i] += weight; }
  double total() const;
  void normalize();  // scale mass to sum 1; no-op on an empty histogram
};

enum class DistKind { tv, ks };

// Total variation or Kolmogorov distance between two normalized
// histograms on the same binning. KS accumulates the CDF from the cut at
// 0 and is defined for dim 1 only.
double histogram_distance(const Histogram& a, const Histogram& b,
                          DistKind kind);

}  // namespace dblrot
