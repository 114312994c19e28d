#include "dblrot/box_union.hpp"

#include <algorithm>
#include <cmath>

namespace dblrot {

namespace {

constexpr size_t kCellBudget = size_t(1) << 22;

bool box_contains(const Box& b, int dim, const double* x) {
  for (int i = 0; i < dim; ++i) {
    const Span& s = b.s[static_cast<size_t>(i)];
    if (x[i] < s.lo || x[i] >= s.hi) return false;
  }
  return true;
}

bool any_contains(const std::vector<Box>& bs, int dim, const double* x) {
  for (const Box& b : bs)
    if (box_contains(b, dim, x)) return true;
  return false;
}

bool boxes_overlap(const Box& a, const Box& b, int dim) {
  for (int i = 0; i < dim; ++i) {
    size_t j = static_cast<size_t>(i);
    if (a.s[j].hi <= b.s[j].lo || b.s[j].hi <= a.s[j].lo) return false;
  }
  return true;
}

// sorted unique cut coordinates per axis, always including 0 and 1
std::vector<std::vector<double>> collect_cuts(int dim,
                                              const std::vector<Box>& a,
                                              const std::vector<Box>& b) {
  std::vector<std::vector<double>> cuts(static_cast<size_t>(dim));
  for (int i = 0; i < dim; ++i) {
    auto& c = cuts[static_cast<size_t>(i)];
    c.push_back(0.0);
    c.push_back(1.0);
    for (const Box& x : a) {
      c.push_back(x.s[static_cast<size_t>(i)].lo);
      c.push_back(x.s[static_cast<size_t>(i)].hi);
    }
    for (const Box& x : b) {
      c.push_back(x.s[static_cast<size_t>(i)].lo);
      c.push_back(x.s[static_cast<size_t>(i)].hi);
    }
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  return cuts;
}

size_t cell_count(const std::vector<std::vector<double>>& cuts) {
  size_t n = 1;
  for (const auto& c : cuts) {
    size_t segs = c.size() - 1;
    if (segs == 0) return 0;
    if (n > kCellBudget / segs)
      throw capacity_error("cut grid exceeds the cell budget");
    n *= segs;
  }
  return n;
}

// visit every cell of the cut grid; fn gets (center coords, cell volume)
template <typename Fn>
void for_each_cell(int dim, const std::vector<std::vector<double>>& cuts,
                   Fn&& fn) {
  size_t total = cell_count(cuts);
  if (total == 0) return;
  std::array<size_t, kMaxDim> idx{};
  double center[kMaxDim];
  for (size_t n = 0; n < total; ++n) {
    double vol = 1.0;
    for (int i = 0; i < dim; ++i) {
      const auto& c = cuts[static_cast<size_t>(i)];
      size_t j = idx[static_cast<size_t>(i)];
      center[i] = 0.5 * (c[j] + c[j + 1]);
      vol *= c[j + 1] - c[j];
    }
    fn(center, vol);
    // odometer increment
    for (int i = dim - 1; i >= 0; --i) {
      size_t j = static_cast<size_t>(i);
      if (++idx[j] < cuts[j].size() - 1) break;
      idx[j] = 0;
    }
  }
}

}  // namespace

BoxUnion::BoxUnion(int dim) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim)
    throw invalid_input_error("box union dimension out of range");
}

void BoxUnion::set_boxes(std::vector<Box> disjoint) {
  boxes_ = std::move(disjoint);
  measure_ = 0.0;
  for (const Box& b : boxes_) measure_ += b.volume(dim_);
}

BoxUnion BoxUnion::full(int dim) {
  BoxUnion out(dim);
  Box b;
  for (int i = 0; i < dim; ++i) b.s[static_cast<size_t>(i)] = {0.0, 1.0};
  out.set_boxes({b});
  return out;
}

BoxUnion BoxUnion::from_boxes(int dim, const std::vector<Box>& raw) {
  BoxUnion out(dim);
  // split wrapping spans axis by axis
  std::vector<Box> flat;
  for (const Box& b : raw) {
    std::vector<Box> parts = {Box{}};
    for (int i = 0; i < dim; ++i) {
      size_t j = static_cast<size_t>(i);
      const Span& s = b.s[j];
      if (!std::isfinite(s.lo) || !std::isfinite(s.hi) || s.lo < 0.0 ||
          s.lo >= 1.0 || s.hi < 0.0 || s.hi > 1.0)
        throw invalid_input_error("box span endpoint outside [0,1]");
      if (s.lo == s.hi)
        throw invalid_input_error(
            "box span with equal endpoints is ambiguous");
      std::vector<std::pair<double, double>> pieces;
      if (s.lo < s.hi) {
        pieces = {{s.lo, s.hi}};
      } else {
        pieces = {{s.lo, 1.0}};
        if (s.hi > 0.0) pieces.push_back({0.0, s.hi});
      }
      std::vector<Box> grown;
      for (const Box& p : parts)
        for (auto [lo, hi] : pieces) {
          Box q = p;
          q.s[j] = {lo, hi};
          grown.push_back(q);
        }
      parts.swap(grown);
    }
    flat.insert(flat.end(), parts.begin(), parts.end());
  }

  // keep input structure if it is already disjoint
  bool disjoint = true;
  for (size_t i = 0; i < flat.size() && disjoint; ++i)
    for (size_t j = i + 1; j < flat.size(); ++j)
      if (boxes_overlap(flat[i], flat[j], dim)) {
        disjoint = false;
        break;
      }
  if (disjoint) {
    out.set_boxes(std::move(flat));
    return out;
  }

  // re-cut overlapping input into grid cells covered by at least one box
  auto cuts = collect_cuts(dim, flat, {});
  std::vector<Box> cells;
  for_each_cell(dim, cuts, [&](const double* center, double) {
    if (!any_contains(flat, dim, center)) return;
    Box cell;
    for (int i = 0; i < dim; ++i) {
      const auto& c = cuts[static_cast<size_t>(i)];
      auto it = std::upper_bound(c.begin(), c.end(), center[i]);
      size_t j = static_cast<size_t>(it - c.begin()) - 1;
      cell.s[static_cast<size_t>(i)] = {c[j], c[j + 1]};
    }
    cells.push_back(cell);
  });
  out.set_boxes(std::move(cells));
  return out;
}

BoxUnion BoxUnion::product(const std::vector<IntervalUnion>& factors) {
  int dim = static_cast<int>(factors.size());
  BoxUnion out(dim);
  std::vector<Box> boxes = {Box{}};
  for (int i = 0; i < dim; ++i) {
    size_t j = static_cast<size_t>(i);
    std::vector<Box> grown;
    for (const Box& b : boxes)
      for (const Arc& a : factors[j].arcs()) {
        Box q = b;
        q.s[j] = {a.lo, a.hi};
        grown.push_back(q);
      }
    boxes.swap(grown);
    if (boxes.size() > kCellBudget)
      throw capacity_error("product set exceeds the box budget");
  }
  out.set_boxes(std::move(boxes));
  return out;
}

bool BoxUnion::contains(const TorusPoint& p) const {
  if (p.dim() != dim_)
    throw invalid_input_error("dimension mismatch in contains");
  double x[kMaxDim];
  for (int i = 0; i < dim_; ++i) x[i] = p[i];
  return any_contains(boxes_, dim_, x);
}

BoxUnion BoxUnion::translated(const TranslationVector& u) const {
  if (u.dim() != dim_)
    throw invalid_input_error("dimension mismatch in translated");
  BoxUnion out(dim_);
  std::vector<Box> moved;
  moved.reserve(boxes_.size());
  for (const Box& b : boxes_) {
    std::vector<Box> parts = {Box{}};
    for (int i = 0; i < dim_; ++i) {
      size_t j = static_cast<size_t>(i);
      double s = wrap_unit(u[i]);
      double lo = b.s[j].lo + s;
      double hi = b.s[j].hi + s;
      std::vector<std::pair<double, double>> pieces;
      if (hi <= 1.0)
        pieces = {{lo, hi}};
      else if (lo >= 1.0)
        pieces = {{lo - 1.0, hi - 1.0}};
      else
        pieces = {{lo, 1.0}, {0.0, hi - 1.0}};
      std::vector<Box> grown;
      for (const Box& p : parts)
        for (auto [plo, phi] : pieces) {
          Box q = p;
          q.s[j] = {plo, phi};
          grown.push_back(q);
        }
      parts.swap(grown);
    }
    // translation is a torus bijection, so disjointness is preserved
    moved.insert(moved.end(), parts.begin(), parts.end());
  }
  out.set_boxes(std::move(moved));
  return out;
}

double intersection_measure(const BoxUnion& a, const BoxUnion& b) {
  if (a.dim() != b.dim())
    throw invalid_input_error("dimension mismatch in intersection_measure");
  if (a.empty() || b.empty()) return 0.0;
  double total = 0.0;
  auto cuts = collect_cuts(a.dim(), a.boxes(), b.boxes());
  for_each_cell(a.dim(), cuts, [&](const double* center, double vol) {
    if (any_contains(a.boxes(), a.dim(), center) &&
        any_contains(b.boxes(), b.dim(), center))
      total += vol;
  });
  return total;
}

double symm_diff_measure(const BoxUnion& a, const BoxUnion& b) {
  return a.measure() + b.measure() - 2.0 * intersection_measure(a, b);
}

}  // namespace dblrot
