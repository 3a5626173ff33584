#pragma once

#include "place/dp_placer.hpp"

namespace semql {

// Optimality oracle: enumerates every legal assignment of filters to nodes
// (and every evaluation order of co-located filters), evaluating each full
// plan's cost bottom-up from the cost-model primitives. Shares no search or
// recurrence code with the DP. Enumeration budget: at most 6 filters and 12
// skeleton nodes.
Placement brute_force_place(const PlacementProblem& problem);

}  // namespace semql
