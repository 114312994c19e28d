#pragma once

#include <json.hpp>

#include "dblrot/sets.hpp"

namespace dblrot {

// JSON descriptors for target sets, the on disk form used by config files
// and embedded in every output. Supported kinds:
//
//   {"kind": "intervals", "segments": [[0.0, 0.3], ...]}
//   {"kind": "cantor",    "depth": 8}
//   {"kind": "boxes",     "dim": 2, "boxes": [[[0,0.5],[0,0.5]], ...]}
//   {"kind": "product",   "factors": [<1D descriptor>, ...]}
//
// parse_set realizes the set; set_to_json writes the canonical extensional
// form (intervals or boxes), so parse(set_to_json(s)) reproduces s exactly.

SetRep parse_set(const nlohmann::json& j);
nlohmann::json set_to_json(const SetRep& s);

}  // namespace dblrot
