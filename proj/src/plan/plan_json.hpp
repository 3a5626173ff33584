#pragma once

#include <string>

#include <json.hpp>

#include "plan/plan_tree.hpp"

namespace semql {

// Canonical plan JSON: {"catalog": {...}, "nodes": {id: {...}}, "root": id}.
// nlohmann::json orders keys lexicographically, which is the canonical form
// used by golden-file tests; to_json(from_json(x)) is byte-identical for
// canonicalized input.
nlohmann::json tree_to_json(const PlanTree& tree);
PlanTree tree_from_json(const nlohmann::json& j);

nlohmann::json catalog_to_json(const Catalog& catalog);
Catalog catalog_from_json(const nlohmann::json& j);

std::string dump_canonical(const nlohmann::json& j);

}  // namespace semql
