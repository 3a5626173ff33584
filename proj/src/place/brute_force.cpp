#include "place/brute_force.hpp"

#include <algorithm>
#include <functional>

#include "common/error.hpp"
#include "rewrite/rewriter.hpp"

namespace semql {

namespace {

// independent legality walk: original position, then ancestors while every
// crossed node is a swappable relational operator
std::vector<NodeId> legal_positions(const PlanTree& skeleton, NodeId origin) {
  std::vector<NodeId> out{origin};
  NodeId ceiling = output_projection(skeleton);
  auto parents = skeleton.parent_map();
  NodeId cur = origin;
  while (parents.count(cur)) {
    NodeId p = parents.at(cur);
    NodeKind kind = skeleton.node(p).kind;
    bool crossable = kind == NodeKind::RelFilter || kind == NodeKind::InnerJoin || kind == NodeKind::CrossJoin ||
                     (kind == NodeKind::Project && p != ceiling);
    if (!crossable) break;
    out.push_back(p);
    cur = p;
  }
  return out;
}

struct Assignment {
  std::vector<NodeId> target;                      // per filter index
  std::map<NodeId, std::vector<size_t>> stacked;   // evaluation order per node
};

struct EvalResult {
  double llm = 0;
  double rel = 0;
};

// bottom-up accumulation with the same per-node shape the recurrence-based
// optimizer uses: children, then the relational term, then placed filters in
// evaluation order
EvalResult evaluate_assignment(const PlacementProblem& problem, const Assignment& assignment) {
  std::map<NodeId, uint32_t> below;
  EvalResult out;
  for (NodeId u : problem.order) {
    uint32_t b = 0;
    for (NodeId child : problem.skeleton.node(u).children) {
      b |= below.at(child);
      auto it = assignment.stacked.find(child);
      if (it != assignment.stacked.end()) {
        for (size_t i : it->second) b |= 1u << i;
      }
    }
    below[u] = b;
    out.rel += problem.relational_term(u, b);
    auto it = assignment.stacked.find(u);
    if (it != assignment.stacked.end()) {
      uint32_t placed = b;
      for (size_t i : it->second) {
        out.llm += problem.distinct.at(u).at(i) * problem.sel_for_filter(i, placed);
        placed |= 1u << i;
      }
    }
  }
  return out;
}

}  // namespace

Placement brute_force_place(const PlacementProblem& problem) {
  const size_t n = problem.filters.size();
  if (n > 6 || problem.skeleton.nodes.size() > 12) {
    throw SemqlError(ErrorKind::Optimize, "brute-force enumeration budget exceeded");
  }

  std::vector<std::vector<NodeId>> positions;
  size_t combination_count = 1;
  for (size_t i = 0; i < n; ++i) {
    positions.push_back(legal_positions(problem.skeleton, problem.filters[i].original_position));
    combination_count *= positions.back().size();
    if (combination_count > 5'000'000) {
      throw SemqlError(ErrorKind::Optimize, "brute-force enumeration budget exceeded");
    }
  }

  const double alpha = problem.config.alpha;
  bool found = false;
  double best_objective = 0;
  EvalResult best_eval;
  Assignment best_assignment;

  std::vector<size_t> odometer(n, 0);
  while (true) {
    Assignment assignment;
    assignment.target.resize(n);
    std::map<NodeId, std::vector<size_t>> groups;
    for (size_t i = 0; i < n; ++i) {
      assignment.target[i] = positions[i][odometer[i]];
      groups[assignment.target[i]].push_back(i);
    }
    // every evaluation order of co-located filters
    std::function<void(size_t)> try_orders = [&](size_t group_index) {
      auto it = groups.begin();
      std::advance(it, group_index);
      if (it == groups.end()) {
        EvalResult eval = evaluate_assignment(problem, assignment);
        double objective = eval.llm + alpha * eval.rel;
        if (!found || objective < best_objective) {
          found = true;
          best_objective = objective;
          best_eval = eval;
          best_assignment = assignment;
        }
        return;
      }
      std::vector<size_t> perm = it->second;
      std::sort(perm.begin(), perm.end());
      do {
        assignment.stacked[it->first] = perm;
        try_orders(group_index + 1);
      } while (std::next_permutation(perm.begin(), perm.end()));
      assignment.stacked.erase(it->first);
    };
    try_orders(0);

    // odometer
    size_t k = 0;
    while (k < n) {
      if (++odometer[k] < positions[k].size()) break;
      odometer[k] = 0;
      ++k;
    }
    if (k == n || n == 0) break;
  }

  if (!found) throw SemqlError(ErrorKind::Optimize, "no legal placement found");

  Placement out;
  for (size_t i = 0; i < n; ++i) out.assignments[problem.filters[i].filter_node] = best_assignment.target[i];
  out.stacking = best_assignment.stacked;
  out.estimated = CostEstimate::make(best_eval.llm, best_eval.rel, alpha);
  return out;
}

}  // namespace semql
