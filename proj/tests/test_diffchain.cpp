#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "dblrot/diffchain.hpp"
#include "dblrot/rds.hpp"

using namespace dblrot;

namespace {

std::shared_ptr<const SetRep> interval_set() {
  return std::make_shared<const SetRep>(
      SetRep{IntervalUnion::from_segments({{0.0, 0.3}})});
}

std::shared_ptr<const SetRep> cantor_set(int depth) {
  return std::make_shared<const SetRep>(SetRep{realize_cantor(depth)});
}

double default_v1() { return std::sqrt(2.0) - 1.0; }

}  // namespace

TEST_CASE("lattice phi sites and memoized values") {
  LatticePhi lp(interval_set(), wrap({0.2}), {default_v1()});
  CHECK(lp.dim() == 1);
  CHECK(lp.site(0)[0] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(lp.site(1)[0] ==
        doctest::Approx(wrap_unit(0.2 + default_v1())).epsilon(1e-15));
  CHECK(lp.site(-2)[0] ==
        doctest::Approx(wrap_unit(0.2 - 2.0 * default_v1())).epsilon(1e-12));
  CHECK(lp.at(0) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(lp.at(0) == lp.at(0));

  LatticePhi bad([](const TorusPoint&) { return 1.5; }, wrap({0.0}), {0.4});
  CHECK_THROWS_AS(bad.at(3), invalid_probability_error);
  LatticePhi neg([](const TorusPoint&) { return -0.1; }, wrap({0.0}), {0.4});
  CHECK_THROWS_AS(neg.at(1), invalid_probability_error);
}

TEST_CASE("chain at the origin never moves") {
  LatticePhi lp(interval_set(), wrap({0.0}), {default_v1()});
  ChainOrbit o = chain_orbit(lp, 5000, NoiseStream{1, 1});
  CHECK(o.plus_moves == 0);
  CHECK(o.minus_moves == 0);
  CHECK(o.holds == 5000);
  CHECK(o.final_m == 0);
  CHECK(o.zero_bin_mass == doctest::Approx(1.0));
}

TEST_CASE("chain counters and occupation bookkeeping") {
  LatticePhi lp(interval_set(), wrap({0.33}), {default_v1()});
  ChainOrbit o = chain_orbit(lp, 1000000, NoiseStream{2, 5}, 64, true);
  CHECK(o.plus_moves + o.minus_moves + o.holds == 1000000);
  CHECK(o.occupation.total() == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(o.m_series.size() == 1000001);
  CHECK(o.m_series.front() == 0);
  CHECK(o.m_series.back() == o.final_m);
  for (size_t i = 1; i < o.m_series.size(); i += 131) {
    int64_t dm = o.m_series[i] - o.m_series[i - 1];
    CHECK(dm >= -1);
    CHECK(dm <= 1);
  }
  // symmetric jump probabilities: the signed move count is a mean zero
  // walk with variance = number of moves
  double moves = static_cast<double>(o.plus_moves + o.minus_moves);
  double skew = static_cast<double>(o.plus_moves) -
                static_cast<double>(o.minus_moves);
  CHECK(std::abs(skew) <= 3.0 * std::sqrt(moves));
}

TEST_CASE("slowed orbit with phi = 1 is the plain walk") {
  LatticePhi lp([](const TorusPoint&) { return 1.0; }, wrap({0.5}), {0.3});
  auto [orbit, walk] = slowed_orbit(lp, 2000, NoiseStream{3, 3});
  CHECK(orbit.holds == 0);
  CHECK(orbit.plus_moves + orbit.minus_moves == 2000);
  CHECK(walk.j_n == 2000);
  for (uint64_t t : walk.t) CHECK(t == 1);
  CHECK(!walk.stall_warning);
  REQUIRE(walk.c.size() == 2001);
  for (size_t j = 1; j < walk.c.size(); ++j)
    CHECK(std::abs(walk.c[j] - walk.c[j - 1]) == 1);
}

TEST_CASE("sojourn times are geometric with mean 1/phi") {
  const double p = 0.2;
  LatticePhi lp([&](const TorusPoint&) { return p; }, wrap({0.5}), {0.3});
  auto [orbit, walk] = slowed_orbit(lp, 200000, NoiseStream{4, 9});
  (void)orbit;
  REQUIRE(walk.j_n >= 1000);
  double sum = 0.0;
  uint64_t ones = 0;
  for (uint64_t j = 0; j < walk.j_n; ++j) {
    sum += static_cast<double>(walk.t[j]);
    if (walk.t[j] == 1) ++ones;
  }
  double n = static_cast<double>(walk.j_n);
  double mean = sum / n;
  double sd = std::sqrt(1.0 - p) / p;
  CHECK(std::abs(mean - 1.0 / p) <= 3.0 * sd / std::sqrt(n));
  double p1 = static_cast<double>(ones) / n;
  CHECK(std::abs(p1 - p) <= 3.0 * std::sqrt(p * (1.0 - p) / n));
}

TEST_CASE("walk realization satisfies the slowing identity") {
  LatticePhi lp(interval_set(), wrap({0.41}), {default_v1()});
  auto [orbit, walk] = slowed_orbit(lp, 50000, NoiseStream{6, 2}, 64, true);
  REQUIRE(walk.t.size() == walk.j_n + 1);
  uint64_t partial = 0;
  for (uint64_t j = 0; j < walk.j_n; ++j) partial += walk.t[j];
  CHECK(partial <= 50000);
  CHECK(partial + walk.t[walk.j_n] > 50000);
  CHECK(orbit.plus_moves + orbit.minus_moves == walk.j_n);
  CHECK(orbit.holds == 50000 - walk.j_n);
  CHECK(orbit.occupation.total() == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(orbit.m_series.size() == 50001);
  // the series is the walk read through the sojourn clock
  CHECK(orbit.m_series[0] == 0);
  CHECK(orbit.m_series.back() == orbit.final_m);
}

TEST_CASE("a vanishing phi off the origin stalls with a warning") {
  LatticePhi lp([](const TorusPoint&) { return 0.0; }, wrap({0.25}), {0.3});
  auto [orbit, walk] = slowed_orbit(lp, 1000, NoiseStream{7, 7});
  CHECK(walk.stall_warning);
  CHECK(walk.j_n == 0);
  CHECK(orbit.holds == 1000);
  CHECK(orbit.zero_bin_mass == 0.0);  // all mass at 0.25, not at 0

  // at the exact origin the freeze is the correct behaviour, no warning
  LatticePhi origin([](const TorusPoint& z) { return is_zero(z) ? 0.0 : 1.0; },
                    wrap({0.0}), {0.3});
  auto [o2, w2] = slowed_orbit(origin, 1000, NoiseStream{7, 8});
  CHECK(!w2.stall_warning);
  CHECK(o2.holds == 1000);
}

TEST_CASE("law equivalence between the chain and the slowed walk") {
  LatticePhi lp(interval_set(), wrap({0.37}), {default_v1()});
  LawTestResult r = law_equivalence_test(lp, 30, 100000, NoiseStream{10, 1});
  CHECK(r.chi.p_value > 0.001);
  uint64_t ca = 0, cb = 0;
  for (size_t i = 0; i < r.chain_counts.size(); ++i) {
    ca += r.chain_counts[i];
    cb += r.slowed_counts[i];
  }
  CHECK(ca == 100000);
  CHECK(cb == 100000);
  CHECK(r.m_min == -30);

  // corrupted holding means (twice too long) must be detected
  LawTestResult bad =
      law_equivalence_test(lp, 30, 100000, NoiseStream{10, 2}, 2.0);
  CHECK(bad.chi.p_value < 1e-6);

  // degenerate horizon: both laws are the dirac at 0
  LawTestResult zero = law_equivalence_test(lp, 0, 10000, NoiseStream{10, 3});
  CHECK(zero.chi.stat == 0.0);
  CHECK(zero.chi.p_value == doctest::Approx(1.0));

  CHECK_THROWS_AS(law_equivalence_test(lp, 61, 100000, NoiseStream{10, 4}),
                  invalid_input_error);
  CHECK_THROWS_AS(law_equivalence_test(lp, 30, 999, NoiseStream{10, 5}),
                  invalid_input_error);
  CHECK_THROWS_AS(law_equivalence_test(lp, 30, 100000, NoiseStream{10, 6}, 0.0),
                  invalid_input_error);
}

TEST_CASE("the two point reduction has the chain's law") {
  SystemConfig cfg = SystemConfig::make(
      SetRep{IntervalUnion::from_segments({{0.0, 0.3}})},
      {default_v1()});
  const double z0 = 0.37;
  const uint64_t n = 30, trials = 20000;

  LatticePhi lp(interval_set(), wrap({z0}), {default_v1()});
  std::vector<uint64_t> from_chain(2 * n + 1, 0), from_pairs(2 * n + 1, 0);
  NoiseStream chain_base{41, 100};
  NoiseStream pair_base{41, 200};
  NoiseSource starts(NoiseStream{41, 300});
  for (uint64_t s = 0; s < trials; ++s) {
    ChainOrbit o = chain_orbit(lp, n, chain_base.sub(s), 4);
    from_chain[static_cast<size_t>(o.final_m + static_cast<int64_t>(n))] += 1;
    // uniform starting point so the first pair step is already stationary
    TorusPoint x = wrap({starts.uniform()});
    TorusPoint y = wrap({x[0] - z0});
    TwoPointTrace t = two_point_orbit(cfg, x, y, n, pair_base.sub(s), 4);
    from_pairs[static_cast<size_t>(t.m.back() + static_cast<int64_t>(n))] += 1;
  }
  std::vector<std::pair<uint64_t, uint64_t>> cells;
  for (size_t i = 0; i < from_chain.size(); ++i)
    cells.emplace_back(from_chain[i], from_pairs[i]);
  ChiSquareResult chi = pooled_two_sample_chi_square(cells);
  CHECK(chi.p_value > 0.001);
}

TEST_CASE("predicted density needs an integrable profile") {
  DisplacementProfile p = phi_profile(interval_set());
  CHECK_THROWS_AS(predicted_density(p, 64), not_integrable_error);
}

TEST_CASE("predicted density for the cantor approximant") {
  GridSpec g;
  g.fit_window_lo = std::ldexp(1.0, -21);
  g.fit_window_hi = std::ldexp(1.0, -6);
  DisplacementProfile p = phi_profile(cantor_set(8), g);
  Histogram h = predicted_density(p, 64);
  CHECK(h.total() == doctest::Approx(1.0).epsilon(1e-12));
  for (double m : h.mass) CHECK(m >= 0.0);
  // mass mirrors under eps -> 1 - eps because phi does; the reflection
  // maps bin b onto bin 63 - b, and bins 0 and 63 share the ball mass
  for (int b = 1; b < 32; ++b)
    CHECK(h.mass[static_cast<size_t>(b)] ==
          doctest::Approx(h.mass[static_cast<size_t>(63 - b)]).epsilon(1e-6));
  CHECK(h.mass[0] == doctest::Approx(h.mass[63]).epsilon(1e-6));
  // 1/phi ordering: more mass near the singularity than far from it
  CHECK(h.mass[1] > h.mass[16]);
  CHECK(h.mass[1] > h.mass[32]);
  // the 0 bin collects the analytic power law ball plus its remainder
  CHECK(h.mass[0] > h.mass[1]);
  CHECK(h.mass[0] >= 0.07);
  CHECK(h.mass[0] <= 0.11);

  CHECK_THROWS_AS(predicted_density(p, 8192), invalid_input_error);
}

TEST_CASE("occupation compare distances") {
  LatticePhi lp(interval_set(), wrap({0.3}), {default_v1()});
  ChainOrbit o = chain_orbit(lp, 2000, NoiseStream{15, 1}, 16);
  Histogram same = o.occupation;
  CHECK(occupation_compare(o, same) == 0.0);
  CHECK(occupation_compare(o, same, true) == 0.0);

  Histogram disjoint = Histogram::zeros(1, 16);
  // put all predicted mass where the orbit never went? build from the
  // complement of the occupied bins instead, to stay seed independent
  for (size_t i = 0; i < 16; ++i)
    disjoint.mass[i] = o.occupation.mass[i] > 0.0 ? 0.0 : 1.0;
  if (disjoint.total() > 0.0) {
    disjoint.normalize();
    CHECK(occupation_compare(o, disjoint) == doctest::Approx(1.0));
  }

  Histogram wrong = Histogram::zeros(1, 32);
  wrong.mass[0] = 1.0;
  CHECK_THROWS_AS(occupation_compare(o, wrong), invalid_input_error);
}

TEST_CASE("long chain occupation approaches the predicted density") {
  GridSpec g;
  g.fit_window_lo = std::ldexp(1.0, -21);
  g.fit_window_hi = std::ldexp(1.0, -6);
  DisplacementProfile p = phi_profile(cantor_set(8), g);
  Histogram pred = predicted_density(p, 64);

  LatticePhi lp(cantor_set(8), wrap({0.5}), {default_v1()});
  ChainOrbit o = chain_orbit(lp, 1000000, NoiseStream{16, 4}, 64);
  double tv = occupation_compare(o, pred);
  CHECK(tv <= 0.2);
  // slowed construction targets the same stationary law
  auto [so, sw] = slowed_orbit(lp, 1000000, NoiseStream{16, 5}, 64);
  (void)sw;
  CHECK(occupation_compare(so, pred) <= 0.2);
}
