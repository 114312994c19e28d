#pragma once

#include <variant>

#include "dblrot/box_union.hpp"
#include "dblrot/interval_union.hpp"
#include "dblrot/torus.hpp"

namespace dblrot {

// One measurable target set, either a 1D arc union or a k-dim box union.
// Everything downstream (displacement, orbits, difference chains) goes
// through these dispatch helpers so it never cares which variant it holds.

using SetRep = std::variant<IntervalUnion, BoxUnion>;

int set_dim(const SetRep& s);
double set_measure(const SetRep& s);
bool set_contains(const SetRep& s, const TorusPoint& p);
SetRep translate_set(const SetRep& s, const TranslationVector& u);
double symm_diff_measure(const SetRep& a, const SetRep& b);

// product of 1D factors; a single factor stays 1D
SetRep product_set(const std::vector<IntervalUnion>& factors);

}  // namespace dblrot
