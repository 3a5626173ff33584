#pragma once

#include <string>

#include "plan/plan_tree.hpp"

namespace semql {

// Parses the SQL dialect into a validated PlanTree. Each AND-conjunct of
// WHERE becomes its own RelFilter or SemFilter node pushed to its lowest
// feasible position; SEMANTIC_* select items become SemProject nodes placed
// the same way; non-recursive CTEs are inlined with fresh node ids.
//
// Grammar subset: SELECT list (columns, SEMANTIC_STRING/SEMANTIC_INT(...) AS
// name), FROM with INNER/CROSS JOIN and ON conditions (equi keys and
// SEMANTIC(...)), WHERE AND-conjunctions, ORDER BY, LIMIT, WITH.
//
// Throws SemqlError(Parse) for syntax errors (with position) and
// SemqlError(Bind) for unknown tables/columns and other binding problems.
PlanTree parse(const std::string& sql, const Catalog& catalog);

}  // namespace semql
