#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "dblrot/rng.hpp"
#include "dblrot/sets.hpp"
#include "dblrot/stats.hpp"

namespace dblrot {

// The displacement function of a set A is
//
//   phi_A(eps) = Leb(A symmetric difference (A + eps)),
//
// the fraction of space where translating by eps changes membership. Its
// behaviour near eps = 0 decides everything downstream: whether 1/phi_A is
// integrable, and with it whether the random dynamics synchronizes or
// settles into the stationary density proportional to 1/phi_A.

struct ProfileSample {
  TranslationVector eps;
  double r = 0.0;            // torus distance from eps to 0
  double phi = 0.0;
  bool exact = true;         // geometric value, not Monte Carlo
  double stderr_est = 0.0;   // 0 for exact values
};

// Power law phi ~ c * r^alpha fitted on a radial window in log log space.
struct ExponentFit {
  double c = 0.0;
  double alpha = 0.0;
  double alpha_lo = 0.0, alpha_hi = 0.0;  // 95% CI
  double log_c_se = 0.0;
  double r2 = 0.0;
  int points = 0;
  double window_lo = 0.0, window_hi = 0.0;
};

enum class Verdict { diverges, converges, inconclusive };
const char* verdict_name(Verdict v);

struct GridSpec {
  int uniform_per_axis = 0;   // 0 picks 1024 in 1D, 128 per axis otherwise
  int refine_levels = 40;     // radial samples at r = 2^-j, j = 1..levels
  double fit_window_lo = 0.0; // both 0: automatic window selection by R^2
  double fit_window_hi = 0.0;
  long mc_samples = 200000;   // per point when only an indicator is known
};

struct DisplacementProfile {
  int dim = 1;
  std::shared_ptr<const SetRep> set;  // null when built from an indicator
  double set_measure = 0.0;
  int grid_per_axis = 0;               // resolved uniform grid resolution
  std::vector<ProfileSample> uniform;  // full grid, includes the zero point
  std::vector<ProfileSample> refined;  // dyadic radial samples
  ExponentFit fit;
  Verdict verdict = Verdict::inconclusive;

  // phi never exceeds twice the smaller of Leb(A) and its complement
  double phi_upper_bound() const {
    double m = set_measure;
    return 2.0 * std::min(m, 1.0 - m);
  }
};

// Exact displacement via set geometry.
double phi(const SetRep& A, const TranslationVector& eps);

// Monte Carlo displacement from a membership indicator; returns the
// estimate and its standard error.
std::pair<double, double> phi_mc(
    const std::function<bool(const TorusPoint&)>& indicator, int dim,
    const TranslationVector& eps, long samples, NoiseStream noise);

// Sample phi on a uniform grid plus dyadic radial rays, fit the small
// scale power law and classify integrability of 1/phi.
DisplacementProfile phi_profile(std::shared_ptr<const SetRep> A,
                                const GridSpec& grid = {});
DisplacementProfile phi_profile_mc(
    std::function<bool(const TorusPoint&)> indicator, int dim,
    const GridSpec& grid, NoiseStream noise);

// Integrability of 1/phi over a neighbourhood of 0: with phi ~ c r^alpha
// in dimension k the integral diverges iff alpha >= k. The verdict follows
// the fit CI, with a small slack band treated as divergence when the CI
// straddles k from close below. In k >= 2 a positive pointwise bound
// phi >= chat * r forces convergence regardless of the fit.
Verdict classify_integrability(const DisplacementProfile& profile);

// The largest chat with phi(eps) >= chat * dist(eps, 0) across all profile
// samples. Zero when some off-origin sample has vanishing phi.
double alpha_lower_bound(const DisplacementProfile& profile);

// Normalizing constant Z = integral of 1/phi over the torus, as
// (estimate, error bound). Midpoint quadrature away from the singular ball
// of radius delta0 around 0 (default 8^-4 in 1D, 0.01 in 2D), analytic
// power law tail inside it. Throws not_integrable_error unless the
// profile classifies as convergent.
std::pair<double, double> z_constant(const DisplacementProfile& profile,
                                     double delta0 = 0.0);

// Detects hidden translation symmetries: a set invariant under
// translation by u has phi(u) = 0. ok means no such u was found on the
// uniform grid outside the tolerance ball around 0.
struct SymmetryResult {
  bool ok = true;
  TranslationVector witness;      // grid minimizer of phi
  double phi_at_witness = 0.0;
};
SymmetryResult symmetry_check(const DisplacementProfile& profile,
                              double tolerance = 0.01);

// Displacement of a product set from its 1D factors:
// phi(eps) = 2 (prod m_i - prod (m_i - phi_i(eps_i)/2)).
double phi_product(const std::vector<IntervalUnion>& factors,
                   const TranslationVector& eps);

}  // namespace dblrot
