#pragma once

#include <map>
#include <vector>

#include "cost/cost_model.hpp"
#include "plan/plan_tree.hpp"

namespace semql {

// Precomputed cost-model primitives over the semantic-filter-free skeleton:
// per-node relational cost c(u), table sets, subtree filter masks, legal
// placement chains, and distinct-count estimates N_{u,SF}. Both the DP and
// the brute-force oracle consume these numbers; their search and evaluation
// code paths stay separate.
struct PlacementProblem {
  PlanTree skeleton;
  std::vector<SemanticFilterDescriptor> filters;  // ordered by filter node id
  SelectivityModel model;
  OptimizerConfig config;

  std::vector<NodeId> order;  // skeleton postorder
  std::map<NodeId, double> node_cost;
  std::map<NodeId, bool> node_is_join;
  std::map<NodeId, uint32_t> subtree_mask;   // F(u)
  std::map<NodeId, uint32_t> touching_mask;  // filters whose ref tables meet tab(u)
  std::vector<uint32_t> overlap_mask;        // per filter: filters sharing a referenced table
  std::vector<std::vector<NodeId>> legal_chain;  // per filter, ascending from its original position
  std::map<NodeId, std::map<size_t, double>> distinct;  // N_{u,SF_i} for legal (u, i)

  uint32_t full_mask() const { return filters.size() >= 32 ? 0xffffffffu : (1u << filters.size()) - 1; }
  double filter_sel(size_t i) const { return filters[i].selectivity; }

  // product of selectivities of `mask` filters touching tab(u)
  double sel_at_node(NodeId node, uint32_t mask) const;
  // product of selectivities of `mask` filters overlapping filter i's tables
  double sel_for_filter(size_t i, uint32_t mask) const;
  // Step-2 relational term at `node` with `below` placed strictly below it
  double relational_term(NodeId node, uint32_t below) const;
};

PlacementProblem build_placement_problem(const PlanTree& simplified, const SelectivityModel& model,
                                         const OptimizerConfig& config, const ExactStats& stats);

struct Placement {
  std::map<NodeId, NodeId> assignments;            // filter node -> skeleton node
  std::map<NodeId, std::vector<size_t>> stacking;  // node -> filter indexes in placed order
  CostEstimate estimated;
  uint64_t state_expansions = 0;
};

// Algorithm: bottom-up DP over (node, filter-subset) states, subsets in
// increasing size; Step 1 distributes filters to children (subset
// convolution at binary nodes), Step 2 adds the discounted relational cost
// (with cache-probe row-equivalents folded in at joins), Step 3 tries
// placing each remaining filter at the node. Traceback yields the placement.
// `state_trace`, when given, receives one line per finite state.
Placement dp_place(const PlacementProblem& problem, std::vector<std::string>* state_trace = nullptr);

// Re-inserts the simplified tree's semantic filters directly above their
// assigned nodes; co-located filters stack bottom-to-top by ascending
// filter node id. Errors when an assignment is outside the filter's range.
PlanTree apply_placement(const PlanTree& simplified, const PlacementProblem& problem, const Placement& placement);

}  // namespace semql
