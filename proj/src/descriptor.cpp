#include "dblrot/descriptor.hpp"

#include <string>

namespace dblrot {

using nlohmann::json;

namespace {

IntervalUnion parse_intervals(const json& j) {
  std::vector<std::pair<double, double>> segs;
  for (const auto& s : j.at("segments")) {
    if (!s.is_array() || s.size() != 2)
      throw invalid_input_error("interval segment must be a [lo, hi] pair");
    segs.emplace_back(s[0].get<double>(), s[1].get<double>());
  }
  return IntervalUnion::from_segments(segs);
}

IntervalUnion parse_1d(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "intervals") return parse_intervals(j);
  if (kind == "cantor") return realize_cantor(j.at("depth").get<int>());
  throw invalid_input_error("expected a 1D set descriptor, got kind '" +
                            kind + "'");
}

}  // namespace

SetRep parse_set(const json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw invalid_input_error("set descriptor must be an object with 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "intervals" || kind == "cantor") return parse_1d(j);
  if (kind == "boxes") {
    int dim = j.at("dim").get<int>();
    std::vector<Box> boxes;
    for (const auto& jb : j.at("boxes")) {
      if (!jb.is_array() || static_cast<int>(jb.size()) != dim)
        throw invalid_input_error("box must list one [lo, hi] span per axis");
      Box b;
      for (int i = 0; i < dim; ++i) {
        const auto& s = jb[static_cast<size_t>(i)];
        if (!s.is_array() || s.size() != 2)
          throw invalid_input_error("box span must be a [lo, hi] pair");
        b.s[static_cast<size_t>(i)] = {s[0].get<double>(),
                                       s[1].get<double>()};
      }
      boxes.push_back(b);
    }
    return BoxUnion::from_boxes(dim, boxes);
  }
  if (kind == "product") {
    std::vector<IntervalUnion> factors;
    for (const auto& f : j.at("factors")) factors.push_back(parse_1d(f));
    return product_set(factors);
  }
  throw invalid_input_error("unknown set kind '" + kind + "'");
}

json set_to_json(const SetRep& s) {
  json out;
  if (const auto* iu = std::get_if<IntervalUnion>(&s)) {
    out["kind"] = "intervals";
    json segs = json::array();
    for (const Arc& a : iu->arcs()) segs.push_back({a.lo, a.hi});
    out["segments"] = std::move(segs);
    return out;
  }
  const BoxUnion& bu = std::get<BoxUnion>(s);
  out["kind"] = "boxes";
  out["dim"] = bu.dim();
  json boxes = json::array();
  for (const Box& b : bu.boxes()) {
    json spans = json::array();
    for (int i = 0; i < bu.dim(); ++i)
      spans.push_back(
          {b.s[static_cast<size_t>(i)].lo, b.s[static_cast<size_t>(i)].hi});
    boxes.push_back(std::move(spans));
  }
  out["boxes"] = std::move(boxes);
  return out;
}

}  // namespace dblrot
