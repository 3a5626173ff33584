#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "plan/plan_tree.hpp"

namespace semql {

struct RewriteStep {
  std::string rewrite;  // "sp_pullup", "sj_decompose", "filter_pushdown"
  std::vector<NodeId> nodes;
};

struct RewriteTrace {
  std::vector<RewriteStep> steps;
};

// Column dependencies between operators: an edge A -> B when A references a
// column B produces. Acyclic on valid plans; every derived column traces to
// exactly one producer.
struct DependencyGraph {
  std::map<NodeId, std::set<NodeId>> edges;

  bool has_cycle() const;
};

DependencyGraph build_dependency_graph(const PlanTree& tree);

// The node semantic filters and projections may not be placed at or above:
// the projection defining the user-visible output schema (the top-most
// Project reachable from the root through block operators), or 0 when the
// plan has none.
NodeId output_projection(const PlanTree& tree);

// Moves every SemProject to its highest feasible position: no block operator
// crossed, dependent operators re-stacked above it in their original
// relative order, crossed projections widened with the projection's input
// columns. Output multiset unchanged.
bool pull_up_semantic_projections(PlanTree& tree, RewriteTrace* trace = nullptr);

// Rewrites every keyless inner join (the semantic-join shape) into a marked
// CrossJoin; the semantic predicate already lives in a separate SemFilter
// above it and is repositioned like any other filter.
bool decompose_semantic_joins(PlanTree& tree, RewriteTrace* trace = nullptr);

// Pushes relational filters down to their lowest feasible positions. Never
// crosses block operators, other relational filters, or operators producing
// a referenced column.
bool push_down_relational_filters(PlanTree& tree, RewriteTrace* trace = nullptr);

// Applies the reductions repeatedly until no semantic-join shape remains and
// no SemProject can move; the result is the simplified tree both optimizers
// consume. Throws on a tripped non-termination guard.
PlanTree simplify_to_fixed_point(const PlanTree& tree, RewriteTrace* trace = nullptr);

}  // namespace semql
