#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dblrot/errors.hpp"

namespace dblrot {

// Upper tail of the chi squared distribution with dof degrees of freedom.
double chi_square_tail(double stat, int dof);

// 97.5% quantile of Student's t, for two sided 95% intervals.
double student_t_975(int dof);

// Ordinary least squares line y = intercept + slope * x.
struct OlsFit {
  int n = 0;
  double slope = 0.0, intercept = 0.0;
  double slope_se = 0.0, intercept_se = 0.0;
  double r2 = 0.0;
  double slope_lo = 0.0, slope_hi = 0.0;  // 95% confidence bounds
};

// Throws degenerate_fit_error when fewer than 3 points remain or the
// abscissae have no spread.
OlsFit ols_fit(const std::vector<double>& x, const std::vector<double>& y);

// Kolmogorov limit tail Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_tail(double lambda);

struct KsResult {
  double d_stat = 0.0;
  double p_value = 1.0;
  size_t n1 = 0, n2 = 0;
};

// Two sample Kolmogorov Smirnov test with the small sample correction
// lambda = (sqrt(ne) + 0.12 + 0.11/sqrt(ne)) * D. Copies are sorted inside.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct ChiSquareResult {
  double stat = 0.0;
  int dof = 0;
  double p_value = 1.0;
  int pooled_cells = 0;
};

// Two sample chi squared test on aligned count vectors over an ordered
// support. Adjacent cells are pooled until every pooled cell has expected
// count >= min_expected in both samples; fewer than two pooled cells is an
// underpowered_test_error.
ChiSquareResult pooled_two_sample_chi_square(
    const std::vector<std::pair<uint64_t, uint64_t>>& cells,
    double min_expected = 5.0);

}  // namespace dblrot
