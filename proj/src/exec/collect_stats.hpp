#pragma once

#include "cost/cost_model.hpp"
#include "exec/executor.hpp"

namespace semql {

// Measures exact statistics on the semantic-filter-free skeleton of `tree`:
// per-node output cardinalities and, at every node, the distinct non-null
// projection count onto each base table below it. The oracle is needed only
// when the skeleton contains semantic projections. Used to inject exact
// stats into the optimizers for deterministic tests and presets.
ExactStats collect_exact_stats(const PlanTree& tree, const Dataset& data, SemanticOracle& oracle);

// Copy of the tree with every SemFilter spliced out (node ids preserved).
PlanTree strip_semantic_filters(const PlanTree& tree);

}  // namespace semql
