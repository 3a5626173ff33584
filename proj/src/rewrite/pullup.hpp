#pragma once

#include <vector>

#include "plan/plan_tree.hpp"

namespace semql {

struct SwapRecord {
  NodeId filter = 0;
  NodeId crossed = 0;  // the former parent the filter moved above
};

struct PullUpResult {
  PlanTree tree;
  size_t outer_iterations = 0;  // bounded by n * depth
  std::vector<SwapRecord> swaps;
};

// Greedy semantic-filter pull-up: repeated passes over all filters in
// node-id order, swapping each with its parent unless the parent is the
// root, the output projection, a block operator, another semantic filter, or
// a semantic projection. Crossed projections are widened with the filter's
// referenced columns so the predicate stays evaluable. Runs until a full
// pass performs no swap.
PullUpResult pull_up_all(const PlanTree& tree);

}  // namespace semql
