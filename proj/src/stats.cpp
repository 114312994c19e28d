#include "dblrot/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace dblrot {

double chi_square_tail(double stat, int dof) {
  if (dof < 1) throw invalid_input_error("chi squared needs dof >= 1");
  if (stat <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * stat);
}

double student_t_975(int dof) {
  if (dof < 1) throw invalid_input_error("t quantile needs dof >= 1");
  boost::math::students_t dist(dof);
  return boost::math::quantile(dist, 0.975);
}

OlsFit ols_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size())
    throw invalid_input_error("ols_fit needs equally long vectors");
  const size_t n = x.size();
  if (n < 3)
    throw degenerate_fit_error("regression needs at least 3 points, got " +
                               std::to_string(n));
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0)
    throw degenerate_fit_error("regression abscissae have no spread");

  OlsFit fit;
  fit.n = static_cast<int>(n);
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double r = y[i] - (fit.intercept + fit.slope * x[i]);
    rss += r * r;
  }
  double sigma2 = rss / static_cast<double>(n - 2);
  fit.slope_se = std::sqrt(sigma2 / sxx);
  fit.intercept_se =
      std::sqrt(sigma2 * (1.0 / static_cast<double>(n) + mx * mx / sxx));
  fit.r2 = (syy > 0.0) ? 1.0 - rss / syy : 1.0;
  double t = student_t_975(fit.n - 2);
  fit.slope_lo = fit.slope - t * fit.slope_se;
  fit.slope_hi = fit.slope + t * fit.slope_se;
  return fit;
}

double kolmogorov_tail(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1) ? term : -term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.size() < 2 || b.size() < 2)
    throw underpowered_test_error("ks test needs at least 2 points per side");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  KsResult res;
  res.n1 = a.size();
  res.n2 = b.size();
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double xa = a[i], xb = b[j];
    if (xa <= xb)
      while (i < a.size() && a[i] == xa) ++i;
    if (xb <= xa)
      while (j < b.size() && b[j] == xb) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na -
                              static_cast<double>(j) / nb));
  }
  res.d_stat = d;
  double ne = na * nb / (na + nb);
  double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  res.p_value = kolmogorov_tail(lambda);
  return res;
}

ChiSquareResult pooled_two_sample_chi_square(
    const std::vector<std::pair<uint64_t, uint64_t>>& cells,
    double min_expected) {
  double na = 0.0, nb = 0.0;
  for (const auto& [ca, cb] : cells) {
    na += static_cast<double>(ca);
    nb += static_cast<double>(cb);
  }
  if (na == 0.0 || nb == 0.0)
    throw underpowered_test_error("a sample has no observations");
  const double total = na + nb;

  // pool adjacent cells until both expected counts clear the floor
  std::vector<std::pair<double, double>> pooled;
  double accA = 0.0, accB = 0.0;
  for (const auto& [ca, cb] : cells) {
    accA += static_cast<double>(ca);
    accB += static_cast<double>(cb);
    double both = accA + accB;
    if (na * both / total >= min_expected &&
        nb * both / total >= min_expected) {
      pooled.emplace_back(accA, accB);
      accA = accB = 0.0;
    }
  }
  if (accA + accB > 0.0) {
    if (!pooled.empty()) {
      pooled.back().first += accA;
      pooled.back().second += accB;
    } else {
      pooled.emplace_back(accA, accB);
    }
  }
  if (pooled.size() < 2)
    throw underpowered_test_error(
        "fewer than 2 cells clear the expected-count floor; "
        "increase the trial count");

  double stat = 0.0;
  for (const auto& [ca, cb] : pooled) {
    double both = ca + cb;
    double ea = na * both / total;
    double eb = nb * both / total;
    stat += (ca - ea) * (ca - ea) / ea + (cb - eb) * (cb - eb) / eb;
  }
  ChiSquareResult res;
  res.stat = stat;
  res.pooled_cells = static_cast<int>(pooled.size());
  res.dof = res.pooled_cells - 1;
  res.p_value = chi_square_tail(stat, res.dof);
  return res;
}

}  // namespace dblrot
