#include "dblrot/sets.hpp"

namespace dblrot {

int set_dim(const SetRep& s) {
  if (std::holds_alternative<IntervalUnion>(s)) return 1;
  return std::get<BoxUnion>(s).dim();
}

double set_measure(const SetRep& s) {
  return std::visit([](const auto& x) { return x.measure(); }, s);
}

bool set_contains(const SetRep& s, const TorusPoint& p) {
  if (const auto* iu = std::get_if<IntervalUnion>(&s)) {
    if (p.dim() != 1)
      throw invalid_input_error("dimension mismatch in set_contains");
    return iu->contains(p[0]);
  }
  return std::get<BoxUnion>(s).contains(p);
}

SetRep translate_set(const SetRep& s, const TranslationVector& u) {
  if (const auto* iu = std::get_if<IntervalUnion>(&s)) {
    if (u.dim() != 1)
      throw invalid_input_error("dimension mismatch in translate_set");
    return iu->translated(u[0]);
  }
  return std::get<BoxUnion>(s).translated(u);
}

double symm_diff_measure(const SetRep& a, const SetRep& b) {
  if (a.index() != b.index() || set_dim(a) != set_dim(b))
    throw invalid_input_error("set representations do not match");
  if (const auto* iu = std::get_if<IntervalUnion>(&a))
    return symm_diff_measure(*iu, std::get<IntervalUnion>(b));
  return symm_diff_measure(std::get<BoxUnion>(a), std::get<BoxUnion>(b));
}

SetRep product_set(const std::vector<IntervalUnion>& factors) {
  if (factors.empty()) throw invalid_input_error("empty product");
  if (factors.size() == 1) return factors[0];
  return BoxUnion::product(factors);
}

}  // namespace dblrot
