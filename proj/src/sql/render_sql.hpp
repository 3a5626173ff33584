#pragma once

#include <string>

#include "plan/plan_tree.hpp"

namespace semql {

// Emits dialect SQL that re-parses to a structurally equivalent tree
// (round-trip up to node ids and filter positions, which the parser
// re-normalizes to their lowest feasible placement).
// Throws SemqlError(Optimize) for constructs with no surface syntax
// (Aggregate, Union, or a SemProject pinned at a non-renderable position).
std::string render_sql(const PlanTree& tree);

}  // namespace semql
