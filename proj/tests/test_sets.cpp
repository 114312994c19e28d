#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dblrot/descriptor.hpp"
#include "dblrot/rng.hpp"
#include "dblrot/sets.hpp"

using namespace dblrot;

namespace {

IntervalUnion random_union(NoiseSource& src, int max_pieces) {
  std::vector<std::pair<double, double>> segs;
  int n = 1 + static_cast<int>(src.uniform() * max_pieces);
  for (int i = 0; i < n; ++i) {
    double a = src.uniform();
    double b = src.uniform();
    if (a == b) continue;
    segs.emplace_back(a, b);
  }
  if (segs.empty()) segs.emplace_back(0.1, 0.4);
  return IntervalUnion::from_segments(segs);
}

}  // namespace

TEST_CASE("canonical form merges and sorts") {
  auto u = IntervalUnion::from_segments({{0.5, 0.7}, {0.2, 0.5}});
  REQUIRE(u.arcs().size() == 1);
  CHECK(u.arcs()[0].lo == 0.2);
  CHECK(u.arcs()[0].hi == 0.7);
  CHECK(u.measure() == doctest::Approx(0.5).epsilon(1e-15));

  auto v = IntervalUnion::from_segments({{0.1, 0.4}, {0.3, 0.6}, {0.8, 0.9}});
  REQUIRE(v.arcs().size() == 2);
  CHECK(v.arcs()[0].hi == 0.6);
  CHECK(v.measure() == doctest::Approx(0.6).epsilon(1e-15));

  // wrapping segment stored in split form
  auto w = IntervalUnion::from_segments({{0.8, 0.2}});
  REQUIRE(w.arcs().size() == 2);
  CHECK(w.arcs()[0].lo == 0.0);
  CHECK(w.arcs()[0].hi == 0.2);
  CHECK(w.arcs()[1].lo == 0.8);
  CHECK(w.arcs()[1].hi == 1.0);
  CHECK(w.component_count() == 1);
  CHECK(w.largest_component() == doctest::Approx(0.4).epsilon(1e-15));

  CHECK_THROWS_AS(IntervalUnion::from_segments({{0.3, 0.3}}),
                  invalid_input_error);
  CHECK_THROWS_AS(IntervalUnion::from_segments({{-0.1, 0.3}}),
                  invalid_input_error);
}

TEST_CASE("membership respects half open boundaries") {
  auto u = IntervalUnion::from_segments({{0.2, 0.5}, {0.7, 0.9}});
  CHECK(u.contains(0.2));
  CHECK(!u.contains(0.5));
  CHECK(u.contains(0.49999));
  CHECK(!u.contains(0.1));
  CHECK(u.contains(0.7));
  CHECK(!u.contains(0.9));
  CHECK(!IntervalUnion().contains(0.5));
  CHECK(IntervalUnion::full_circle().contains(0.0));
  CHECK(IntervalUnion::full_circle().contains(0.999));
}

TEST_CASE("translation wraps and preserves measure") {
  auto a = IntervalUnion::single(0.0, 0.3).translated(0.9);
  REQUIRE(a.arcs().size() == 2);
  CHECK(a.arcs()[0].lo == 0.0);
  CHECK(a.arcs()[0].hi == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(a.arcs()[1].lo == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(a.arcs()[1].hi == 1.0);
  CHECK(a.measure() == doctest::Approx(0.3).epsilon(1e-15));

  NoiseSource src({5, 11});
  for (int t = 0; t < 300; ++t) {
    auto u = random_union(src, 4);
    double s = src.uniform();
    CHECK(std::fabs(u.translated(s).measure() - u.measure()) <= 1e-12);
    // membership commutes with translation
    double x = src.uniform();
    CHECK(u.translated(s).contains(wrap_unit(x + s)) == u.contains(x));
  }
}

TEST_CASE("boolean operations satisfy inclusion exclusion") {
  NoiseSource src({17, 23});
  for (int t = 0; t < 300; ++t) {
    auto a = random_union(src, 4);
    auto b = random_union(src, 4);
    double lhs = unite(a, b).measure() + intersect(a, b).measure();
    CHECK(std::fabs(lhs - (a.measure() + b.measure())) <= 1e-12);
    CHECK(std::fabs(intersection_measure(a, b) - intersect(a, b).measure()) <=
          1e-12);
    CHECK(std::fabs(subtract(a, b).measure() -
                    (a.measure() - intersection_measure(a, b))) <= 1e-12);
    CHECK(std::fabs(a.complement().measure() - (1.0 - a.measure())) <= 1e-12);
    // symmetric difference against itself vanishes
    CHECK(symm_diff_measure(a, a) <= 1e-12);
    CHECK(std::fabs(symm_diff_measure(a, b) -
                    (subtract(a, b).measure() + subtract(b, a).measure())) <=
          1e-12);
  }
}

TEST_CASE("cantor approximant, first level") {
  auto m1 = realize_cantor(1);
  REQUIRE(m1.arcs().size() == 2);
  CHECK(m1.arcs()[0].lo == 0.0);
  CHECK(m1.arcs()[0].hi == 7.0 / 16.0);
  CHECK(m1.arcs()[1].lo == 9.0 / 16.0);
  CHECK(m1.arcs()[1].hi == 1.0);
  CHECK(m1.measure() == 7.0 / 8.0);
}

TEST_CASE("cantor approximant, measure and arc count") {
  CHECK(CantorSpec{2}.realize().measure() ==
        doctest::Approx(27.0 / 32.0).epsilon(1e-15));
  for (int n = 0; n <= 10; ++n) {
    auto m = realize_cantor(n);
    CHECK(m.arcs().size() == (size_t(1) << n));
    double expect = 5.0 / 6.0 + std::pow(4.0, -n) / 6.0;
    CHECK(m.measure() == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("cantor approximants are nested") {
  for (int n = 0; n < 10; ++n) {
    auto outer = realize_cantor(n);
    auto inner = realize_cantor(n + 1);
    CHECK(subtract(inner, outer).measure() <= 1e-12);
    CHECK(std::fabs(symm_diff_measure(inner, outer) -
                    (outer.measure() - inner.measure())) <= 1e-12);
  }
}

TEST_CASE("cantor membership walk matches the realized union") {
  auto m8 = realize_cantor(8);
  NoiseSource src({31, 8});
  for (int t = 0; t < 10000; ++t) {
    double x = src.uniform();
    CHECK(cantor_contains(x, 8) == m8.contains(x));
  }
  // endpoints of removed intervals: left endpoint is removed (half open
  // arcs keep their left ends, removals are taken as [m-h, m+h))
  CHECK(cantor_contains(0.0, 8));
  CHECK(cantor_contains(0.0, 100));
  CHECK(!cantor_contains(0.5, 1));
  CHECK(!cantor_contains(0.5, 50));
  CHECK(cantor_contains(7.0 / 16.0, 1) == realize_cantor(1).contains(7.0 / 16.0));
}

TEST_CASE("cantor depth limits") {
  CHECK_THROWS_AS(realize_cantor(341), dblrot::unrepresentable_depth_error);
  CHECK_THROWS_AS(cantor_contains(0.3, 341), unrepresentable_depth_error);
  CHECK_THROWS_AS(realize_cantor(-1), invalid_input_error);
  CHECK_THROWS_AS(realize_cantor(30), capacity_error);
  CHECK_NOTHROW(cantor_contains(0.3, 300));
}

TEST_CASE("feature sizes") {
  auto u = IntervalUnion::single(0.0, 0.3);
  CHECK(u.min_feature() == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(u.largest_gap() == doctest::Approx(0.7).epsilon(1e-15));
  auto w = IntervalUnion::from_segments({{0.9, 0.1}, {0.4, 0.5}});
  // wrap joined component has length 0.2, gaps are 0.3 and 0.4
  CHECK(w.component_count() == 2);
  CHECK(w.min_feature() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(w.largest_gap() == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(IntervalUnion::full_circle().largest_gap() == 0.0);
}

TEST_CASE("box product and membership") {
  auto half = IntervalUnion::single(0.0, 0.5);
  auto sq = BoxUnion::product({half, half});
  CHECK(sq.dim() == 2);
  REQUIRE(sq.boxes().size() == 1);
  CHECK(sq.measure() == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(sq.contains(wrap({0.1, 0.4})));
  CHECK(!sq.contains(wrap({0.1, 0.6})));
  CHECK(!sq.contains(wrap({0.5, 0.1})));

  // two arcs per axis give four boxes
  auto two = IntervalUnion::from_segments({{0.0, 0.2}, {0.5, 0.7}});
  auto prod = BoxUnion::product({two, two});
  CHECK(prod.boxes().size() == 4);
  CHECK(prod.measure() == doctest::Approx(0.16).epsilon(1e-12));
}

TEST_CASE("box translation wraps and preserves measure") {
  auto sq = BoxUnion::product({IntervalUnion::single(0.0, 0.5),
                               IntervalUnion::single(0.0, 0.5)});
  auto moved = sq.translated(wrap({0.75, 0.75}));
  CHECK(moved.boxes().size() == 4);
  CHECK(moved.measure() == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(moved.contains(wrap({0.1, 0.1})));
  CHECK(moved.contains(wrap({0.8, 0.8})));
  CHECK(!moved.contains(wrap({0.3, 0.3})));
}

TEST_CASE("box symmetric difference against translate, closed form") {
  // A = [0,1/2)^2 translated by (e1,e2) has
  // symm(A, A+e) = d1 + d2 - 2 d1 d2 with di the circle distance of ei to 0
  auto sq = BoxUnion::product({IntervalUnion::single(0.0, 0.5),
                               IntervalUnion::single(0.0, 0.5)});
  auto at = [&](double e1, double e2) {
    return symm_diff_measure(sq, sq.translated(wrap({e1, e2})));
  };
  CHECK(at(0.1, 0.1) == doctest::Approx(0.18).epsilon(1e-12));
  CHECK(at(0.0, 0.2) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(at(0.9, 0.95) ==
        doctest::Approx(0.1 + 0.05 - 2 * 0.1 * 0.05).epsilon(1e-12));
  CHECK(at(0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("overlapping box input is re-cut into a disjoint cover") {
  Box b1, b2;
  b1.s[0] = {0.0, 0.5};
  b1.s[1] = {0.0, 0.5};
  b2.s[0] = {0.25, 0.75};
  b2.s[1] = {0.25, 0.75};
  auto u = BoxUnion::from_boxes(2, {b1, b2});
  CHECK(u.measure() == doctest::Approx(0.4375).epsilon(1e-12));
  for (size_t i = 0; i < u.boxes().size(); ++i)
    for (size_t j = i + 1; j < u.boxes().size(); ++j) {
      const Box &a = u.boxes()[i], &b = u.boxes()[j];
      bool overlap = true;
      for (int d = 0; d < 2; ++d) {
        size_t dd = static_cast<size_t>(d);
        if (a.s[dd].hi <= b.s[dd].lo || b.s[dd].hi <= a.s[dd].lo)
          overlap = false;
      }
      CHECK(!overlap);
    }
  CHECK(u.contains(wrap({0.6, 0.6})));
  CHECK(!u.contains(wrap({0.1, 0.6})));

  // wrapping span input splits cleanly
  Box w;
  w.s[0] = {0.8, 0.2};
  w.s[1] = {0.0, 0.5};
  auto uw = BoxUnion::from_boxes(2, {w});
  CHECK(uw.measure() == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(uw.contains(wrap({0.9, 0.25})));
  CHECK(uw.contains(wrap({0.1, 0.25})));
  CHECK(!uw.contains(wrap({0.5, 0.25})));
}

TEST_CASE("set variant dispatch") {
  SetRep a = IntervalUnion::single(0.0, 0.3);
  CHECK(set_dim(a) == 1);
  CHECK(set_measure(a) == doctest::Approx(0.3));
  CHECK(set_contains(a, wrap({0.1})));
  CHECK(!set_contains(a, wrap({0.5})));
  SetRep moved = translate_set(a, wrap({0.9}));
  CHECK(set_contains(moved, wrap({0.05})));
  CHECK(std::fabs(symm_diff_measure(a, moved) - 0.2) <= 1e-12);

  SetRep p = product_set({IntervalUnion::single(0.0, 0.5),
                          IntervalUnion::single(0.0, 0.5)});
  CHECK(set_dim(p) == 2);
  CHECK(set_contains(p, wrap({0.2, 0.2})));
  CHECK_THROWS_AS(symm_diff_measure(a, p), invalid_input_error);

  // single factor product stays 1D
  SetRep single = product_set({IntervalUnion::single(0.1, 0.4)});
  CHECK(set_dim(single) == 1);
}

TEST_CASE("descriptor round trip") {
  auto j = nlohmann::json::parse(
      R"({"kind":"intervals","segments":[[0.8,0.2],[0.4,0.5]]})");
  SetRep s = parse_set(j);
  auto out = set_to_json(s);
  CHECK(out["kind"] == "intervals");
  SetRep s2 = parse_set(out);
  CHECK(symm_diff_measure(s, s2) <= 1e-15);
  CHECK(set_to_json(s2) == out);

  auto jc = nlohmann::json::parse(R"({"kind":"cantor","depth":3})");
  SetRep c = parse_set(jc);
  CHECK(set_measure(c) == doctest::Approx(5.0 / 6.0 + std::pow(4.0, -3) / 6.0)
                              .epsilon(1e-14));
  CHECK(set_to_json(c)["segments"].size() == 8);

  auto jb = nlohmann::json::parse(
      R"({"kind":"boxes","dim":2,"boxes":[[[0.0,0.5],[0.0,0.5]]]})");
  SetRep b = parse_set(jb);
  CHECK(set_dim(b) == 2);
  CHECK(set_to_json(parse_set(set_to_json(b))) == set_to_json(b));

  auto jp = nlohmann::json::parse(
      R"({"kind":"product","factors":[{"kind":"intervals","segments":[[0.0,0.5]]},{"kind":"intervals","segments":[[0.0,0.5]]}]})");
  SetRep p = parse_set(jp);
  CHECK(set_measure(p) == doctest::Approx(0.25));

  CHECK_THROWS_AS(parse_set(nlohmann::json::parse(R"({"kind":"moons"})")),
                  invalid_input_error);
  CHECK_THROWS_AS(parse_set(nlohmann::json::parse(R"([1,2])")),
                  invalid_input_error);
}
