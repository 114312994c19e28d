#include "dblrot/interval_union.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dblrot/torus.hpp"

namespace dblrot {

void IntervalUnion::canonicalize(std::vector<Arc> pieces) {
  arcs_.clear();
  measure_ = 0.0;
  if (pieces.empty()) return;

  std::sort(pieces.begin(), pieces.end(),
            [](const Arc& a, const Arc& b) { return a.lo < b.lo; });

  // merge overlapping or endpoint-sharing arcs
  std::vector<Arc> merged;
  merged.push_back(pieces.front());
  for (size_t i = 1; i < pieces.size(); ++i) {
    Arc& cur = merged.back();
    if (pieces[i].lo <= cur.hi) {
      cur.hi = std::max(cur.hi, pieces[i].hi);
    } else {
      merged.push_back(pieces[i]);
    }
  }

  for (const Arc& a : merged)
    if (a.length() >= kMinArc) arcs_.push_back(a);

  // full cover collapses to the single arc [0,1)
  if (arcs_.size() == 1 && arcs_[0].lo == 0.0 && arcs_[0].hi >= 1.0)
    arcs_[0].hi = 1.0;

  for (const Arc& a : arcs_) measure_ += a.length();
}

IntervalUnion IntervalUnion::from_segments(
    const std::vector<std::pair<double, double>>& raw) {
  std::vector<Arc> pieces;
  pieces.reserve(raw.size() + 1);
  for (auto [a, b] : raw) {
    if (!std::isfinite(a) || !std::isfinite(b))
      throw invalid_input_error("non-finite segment endpoint");
    if (a < 0.0 || a >= 1.0 || b < 0.0 || b > 1.0)
      throw invalid_input_error("segment endpoint outside [0,1]");
    if (a == b)
      throw invalid_input_error(
          "segment with equal endpoints is ambiguous; use full_circle()");
    if (a < b) {
      pieces.push_back({a, b});
    } else {
      // wraps through 0, store split
      pieces.push_back({a, 1.0});
      if (b > 0.0) pieces.push_back({0.0, b});
    }
  }
  IntervalUnion out;
  out.canonicalize(std::move(pieces));
  return out;
}

IntervalUnion IntervalUnion::full_circle() {
  IntervalUnion out;
  out.arcs_ = {{0.0, 1.0}};
  out.measure_ = 1.0;
  return out;
}

IntervalUnion IntervalUnion::canonical(std::vector<Arc> pieces) {
  for (const Arc& a : pieces)
    if (!(a.lo >= 0.0 && a.lo < a.hi && a.hi <= 1.0))
      throw invalid_input_error("canonical() arc outside [0,1] or reversed");
  IntervalUnion out;
  out.canonicalize(std::move(pieces));
  return out;
}

bool IntervalUnion::contains(double x) const {
  if (arcs_.empty()) return false;
  // last arc with lo <= x
  auto it = std::upper_bound(
      arcs_.begin(), arcs_.end(), x,
      [](double v, const Arc& a) { return v < a.lo; });
  if (it == arcs_.begin()) return false;
  --it;
  return x < it->hi;
}

IntervalUnion IntervalUnion::translated(double u) const {
  double s = wrap_unit(u);
  std::vector<Arc> pieces;
  pieces.reserve(arcs_.size() + 1);
  for (const Arc& a : arcs_) {
    double lo = a.lo + s;
    double hi = a.hi + s;
    if (hi <= 1.0) {
      pieces.push_back({lo, hi});
    } else if (lo >= 1.0) {
      pieces.push_back({lo - 1.0, hi - 1.0});
    } else {
      pieces.push_back({lo, 1.0});
      pieces.push_back({0.0, hi - 1.0});
    }
  }
  IntervalUnion out;
  out.canonicalize(std::move(pieces));
  return out;
}

IntervalUnion IntervalUnion::complement() const {
  if (arcs_.empty()) return full_circle();
  std::vector<Arc> gaps;
  // gap before the first arc (wrapping from the last one)
  const Arc& first = arcs_.front();
  const Arc& last = arcs_.back();
  if (first.lo > 0.0) gaps.push_back({0.0, first.lo});
  for (size_t i = 0; i + 1 < arcs_.size(); ++i)
    gaps.push_back({arcs_[i].hi, arcs_[i + 1].lo});
  if (last.hi < 1.0) gaps.push_back({last.hi, 1.0});
  IntervalUnion out;
  out.canonicalize(std::move(gaps));
  return out;
}

int IntervalUnion::component_count() const {
  if (arcs_.empty()) return 0;
  int n = static_cast<int>(arcs_.size());
  // the split pair around 0 is one topological component
  if (n > 1 && arcs_.front().lo == 0.0 && arcs_.back().hi == 1.0) n -= 1;
  return n;
}

double IntervalUnion::largest_component() const {
  if (arcs_.empty()) return 0.0;
  bool wraps = arcs_.size() > 1 && arcs_.front().lo == 0.0 &&
               arcs_.back().hi == 1.0;
  double best = 0.0;
  size_t lo_i = 0, hi_i = arcs_.size();
  if (wraps) {
    best = arcs_.front().length() + arcs_.back().length();
    lo_i = 1;
    hi_i = arcs_.size() - 1;
  }
  for (size_t i = lo_i; i < hi_i; ++i)
    best = std::max(best, arcs_[i].length());
  return best;
}

double IntervalUnion::largest_gap() const {
  return complement().largest_component();
}

double IntervalUnion::min_feature() const {
  double m = 1.0;
  bool wraps = arcs_.size() > 1 && arcs_.front().lo == 0.0 &&
               arcs_.back().hi == 1.0;
  for (size_t i = 0; i < arcs_.size(); ++i) {
    double len = arcs_[i].length();
    if (wraps && i == 0) len += arcs_.back().length();
    if (wraps && i + 1 == arcs_.size()) continue;  // counted with arc 0
    m = std::min(m, len);
  }
  IntervalUnion gaps = complement();
  bool gwraps = gaps.arcs_.size() > 1 && gaps.arcs_.front().lo == 0.0 &&
                gaps.arcs_.back().hi == 1.0;
  for (size_t i = 0; i < gaps.arcs_.size(); ++i) {
    double len = gaps.arcs_[i].length();
    if (gwraps && i == 0) len += gaps.arcs_.back().length();
    if (gwraps && i + 1 == gaps.arcs_.size()) continue;
    m = std::min(m, len);
  }
  return m;
}

double intersection_measure(const IntervalUnion& a, const IntervalUnion& b) {
  const auto& xa = a.arcs();
  const auto& xb = b.arcs();
  double total = 0.0;
  size_t i = 0, j = 0;
  while (i < xa.size() && j < xb.size()) {
    double lo = std::max(xa[i].lo, xb[j].lo);
    double hi = std::min(xa[i].hi, xb[j].hi);
    if (hi > lo) total += hi - lo;
    if (xa[i].hi < xb[j].hi)
      ++i;
    else
      ++j;
  }
  return total;
}

IntervalUnion intersect(const IntervalUnion& a, const IntervalUnion& b) {
  std::vector<Arc> pieces;
  const auto& xa = a.arcs();
  const auto& xb = b.arcs();
  size_t i = 0, j = 0;
  while (i < xa.size() && j < xb.size()) {
    double lo = std::max(xa[i].lo, xb[j].lo);
    double hi = std::min(xa[i].hi, xb[j].hi);
    if (hi > lo) pieces.push_back({lo, hi});
    if (xa[i].hi < xb[j].hi)
      ++i;
    else
      ++j;
  }
  // pieces come out sorted and disjoint; the canonical pass still merges
  // arcs meeting at a shared endpoint and drops degenerate slivers
  return IntervalUnion::canonical(std::move(pieces));
}

IntervalUnion unite(const IntervalUnion& a, const IntervalUnion& b) {
  std::vector<Arc> pieces = a.arcs();
  pieces.insert(pieces.end(), b.arcs().begin(), b.arcs().end());
  return IntervalUnion::canonical(std::move(pieces));
}

IntervalUnion subtract(const IntervalUnion& a, const IntervalUnion& b) {
  return intersect(a, b.complement());
}

double symm_diff_measure(const IntervalUnion& a, const IntervalUnion& b) {
  return a.measure() + b.measure() - 2.0 * intersection_measure(a, b);
}

IntervalUnion CantorSpec::realize() const { return realize_cantor(depth); }

IntervalUnion realize_cantor(int depth) {
  if (depth < 0) throw invalid_input_error("negative construction depth");
  // removed half-length at step j is 2^-(3j+1); below the smallest normal
  // double the construction is not representable
  if (3 * depth + 1 > 1022)
    throw unrepresentable_depth_error(
        "construction depth " + std::to_string(depth) +
        " underflows double precision");
  if (depth > 24)
    throw capacity_error("construction depth " + std::to_string(depth) +
                         " would allocate 2^" + std::to_string(depth) +
                         " arcs");

  std::vector<Arc> arcs = {{0.0, 1.0}};
  for (int j = 1; j <= depth; ++j) {
    double h = std::ldexp(1.0, -3 * j - 1);  // half of 8^-j
    std::vector<Arc> next;
    next.reserve(arcs.size() * 2);
    for (const Arc& a : arcs) {
      double m = 0.5 * (a.lo + a.hi);
      next.push_back({a.lo, m - h});
      next.push_back({m + h, a.hi});
    }
    arcs.swap(next);
  }
  return IntervalUnion::canonical(std::move(arcs));
}

bool cantor_contains(double x, int depth) {
  if (depth < 0) throw invalid_input_error("negative construction depth");
  if (3 * depth + 1 > 1022)
    throw unrepresentable_depth_error("construction depth " +
                                      std::to_string(depth) +
                                      " underflows double precision");
  if (x < 0.0 || x >= 1.0) throw invalid_input_error("point outside [0,1)");
  double lo = 0.0, hi = 1.0;
  for (int j = 1; j <= depth; ++j) {
    // same expressions as realize_cantor so membership matches exactly
    double h = std::ldexp(1.0, -3 * j - 1);
    double m = 0.5 * (lo + hi);
    if (x >= m - h && x < m + h) return false;
    if (x < m - h)
      hi = m - h;
    else
      lo = m + h;
  }
  return true;
}

}  // namespace dblrot
