#include "place/dp_placer.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <limits>

#include "common/error.hpp"
#include "exec/collect_stats.hpp"
#include "rewrite/rewriter.hpp"

namespace semql {

double PlacementProblem::sel_at_node(NodeId node, uint32_t mask) const {
  uint32_t bits = mask & touching_mask.at(node);
  double out = 1.0;
  for (size_t i = 0; i < filters.size(); ++i) {
    if (bits & (1u << i)) out *= filters[i].selectivity;
  }
  return out;
}

double PlacementProblem::sel_for_filter(size_t i, uint32_t mask) const {
  uint32_t bits = mask & overlap_mask[i];
  double out = 1.0;
  for (size_t j = 0; j < filters.size(); ++j) {
    if (bits & (1u << j)) out *= filters[j].selectivity;
  }
  return out;
}

double PlacementProblem::relational_term(NodeId node, uint32_t below) const {
  double term = node_cost.at(node) * sel_at_node(node, below);
  if (node_is_join.at(node)) {
    // every join output row probes the cache once per semantic filter that
    // ends up at or above this join
    int above = std::popcount(subtree_mask.at(node) & ~below);
    term *= 1.0 + config.cache_probe_cost * static_cast<double>(above);
  }
  return term;
}

PlacementProblem build_placement_problem(const PlanTree& simplified, const SelectivityModel& model,
                                         const OptimizerConfig& config, const ExactStats& stats) {
  PlacementProblem problem;
  problem.model = model;
  problem.config = config;
  problem.filters = collect_semantic_filters(simplified, model);
  if (problem.filters.size() > 31) {
    throw SemqlError(ErrorKind::Optimize, "placement supports at most 31 semantic filters");
  }
  problem.skeleton = strip_semantic_filters(simplified);
  problem.order = problem.skeleton.postorder();

  const NodeId ceiling = output_projection(problem.skeleton);
  auto parents = problem.skeleton.parent_map();

  for (NodeId id : problem.order) {
    const PlanNode& node = problem.skeleton.node(id);
    problem.node_cost[id] = relational_cost(problem.skeleton, id, config, stats);
    problem.node_is_join[id] = node.kind == NodeKind::InnerJoin || node.kind == NodeKind::CrossJoin;
    auto tab = tables_under(problem.skeleton, id);
    uint32_t touching = 0;
    for (size_t i = 0; i < problem.filters.size(); ++i) {
      for (const auto& t : problem.filters[i].referenced_tables) {
        if (tab.count(t)) {
          touching |= 1u << i;
          break;
        }
      }
    }
    problem.touching_mask[id] = touching;
    problem.subtree_mask[id] = 0;
  }

  for (size_t i = 0; i < problem.filters.size(); ++i) {
    uint32_t overlap = 0;
    for (size_t j = 0; j < problem.filters.size(); ++j) {
      if (i == j) continue;
      for (const auto& t : problem.filters[j].referenced_tables) {
        if (problem.filters[i].referenced_tables.count(t)) {
          overlap |= 1u << j;
          break;
        }
      }
    }
    problem.overlap_mask.push_back(overlap);
  }

  // F(u): filters whose original position lies in u's subtree
  for (size_t i = 0; i < problem.filters.size(); ++i) {
    NodeId cur = problem.filters[i].original_position;
    if (!problem.skeleton.has_node(cur)) {
      throw SemqlError(ErrorKind::Optimize, "filter original position missing from skeleton");
    }
    while (true) {
      problem.subtree_mask[cur] |= 1u << i;
      auto it = parents.find(cur);
      if (it == parents.end()) break;
      cur = it->second;
    }
  }

  // legal chains: the original position, then ancestors while each crossed
  // node is a non-block relational operator (projections only when they are
  // not the output projection; semantic projections are barriers)
  for (size_t i = 0; i < problem.filters.size(); ++i) {
    std::vector<NodeId> chain{problem.filters[i].original_position};
    NodeId cur = problem.filters[i].original_position;
    while (parents.count(cur)) {
      NodeId p = parents.at(cur);
      NodeKind kind = problem.skeleton.node(p).kind;
      bool crossable = (kind == NodeKind::RelFilter || kind == NodeKind::InnerJoin || kind == NodeKind::CrossJoin ||
                        (kind == NodeKind::Project && p != ceiling));
      if (!crossable) break;
      chain.push_back(p);
      cur = p;
    }
    problem.legal_chain.push_back(std::move(chain));
    for (NodeId u : problem.legal_chain.back()) {
      problem.distinct[u][i] = distinct_count(problem.skeleton, u, problem.filters[i], model, stats);
    }
  }
  return problem;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct DpValue {
  double llm = kInf;
  double rel = kInf;
};

struct Choice {
  enum class Kind { None, Unary, Binary, Place } kind = Choice::Kind::None;
  uint32_t left_mask = 0;  // Binary: subset sent to the first child
  size_t filter = 0;       // Place
};

struct NodeStates {
  std::map<uint32_t, DpValue> value;
  std::map<uint32_t, Choice> choice;
};

}  // namespace

Placement dp_place(const PlacementProblem& problem, std::vector<std::string>* state_trace) {
  const size_t n = problem.filters.size();
  const auto& skeleton = problem.skeleton;
  const double alpha = problem.config.alpha;
  auto objective = [alpha](const DpValue& v) { return v.llm + alpha * v.rel; };

  // placeable(u): filters whose legal chain contains u. A child state with
  // unplaced filters combines at u only when each of them is placeable at u;
  // chains are contiguous, so this check propagates the crossing constraint
  // one level at a time.
  std::map<NodeId, uint32_t> placeable;
  for (NodeId u : problem.order) placeable[u] = 0;
  for (size_t i = 0; i < n; ++i) {
    for (NodeId u : problem.legal_chain[i]) placeable[u] |= 1u << i;
  }

  std::map<NodeId, NodeStates> states;
  uint64_t expansions = 0;

  for (NodeId u : problem.order) {
    const PlanNode& node = skeleton.node(u);
    uint32_t fmask = problem.subtree_mask.at(u);
    NodeStates& st = states[u];

    // submasks of F(u) in increasing size
    std::vector<uint32_t> masks;
    uint32_t sub = fmask;
    while (true) {
      masks.push_back(sub);
      if (sub == 0) break;
      sub = (sub - 1) & fmask;
    }
    std::stable_sort(masks.begin(), masks.end(),
                     [](uint32_t a, uint32_t b) { return std::popcount(a) < std::popcount(b); });

    int last_size = -1;
    for (uint32_t S : masks) {
      assert(std::popcount(S) >= last_size);  // subsets processed in increasing size
      last_size = std::popcount(S);

      // ties: strict improvement only, candidates ordered child-route first,
      // then placements by ascending filter index, so equal-cost plans pick
      // the lower placement and the lower filter id deterministically
      DpValue best;
      Choice best_choice;

      // Step 1: distribute filters to children, Step 2: relational cost at u.
      // A child state is usable only when each of its unplaced filters is
      // still placeable at u.
      if (node.children.empty()) {
        if (S == 0) {
          best = DpValue{0.0, problem.relational_term(u, 0)};
          best_choice.kind = Choice::Kind::None;
        }
      } else if (node.children.size() == 1) {
        NodeId v = node.children[0];
        auto& child = states[v];
        auto it = child.value.find(S & problem.subtree_mask.at(v));
        expansions++;
        if ((S & problem.subtree_mask.at(v)) == S && it != child.value.end() &&
            (problem.subtree_mask.at(v) & ~S & ~placeable.at(u)) == 0) {
          best = it->second;
          best.rel += problem.relational_term(u, S);
          best_choice.kind = Choice::Kind::Unary;
        }
      } else {
        NodeId v1 = node.children[0];
        NodeId v2 = node.children[1];
        const auto& left = states[v1];
        const auto& right = states[v2];
        uint32_t f1 = problem.subtree_mask.at(v1);
        uint32_t f2 = problem.subtree_mask.at(v2);
        uint32_t left_all = f1 & S;
        uint32_t s1 = left_all;
        while (true) {
          expansions++;
          uint32_t s2 = S & ~s1;
          if ((s2 & ~f2) == 0 && (f1 & ~s1 & ~placeable.at(u)) == 0 && (f2 & ~s2 & ~placeable.at(u)) == 0) {
            auto lit = left.value.find(s1);
            auto rit = right.value.find(s2);
            if (lit != left.value.end() && rit != right.value.end()) {
              DpValue cand{lit->second.llm + rit->second.llm, lit->second.rel + rit->second.rel};
              cand.rel += problem.relational_term(u, S);
              if (objective(cand) < objective(best)) {
                best = cand;
                best_choice.kind = Choice::Kind::Binary;
                best_choice.left_mask = s1;
              }
            }
          }
          if (s1 == 0) break;
          s1 = (s1 - 1) & left_all;
        }
      }

      // Step 3: place each semantic filter of S at u
      for (size_t i = 0; i < n; ++i) {
        if (!(S & (1u << i))) continue;
        if (!(placeable.at(u) & (1u << i))) continue;
        expansions++;
        auto prev = st.value.find(S & ~(1u << i));
        if (prev == st.value.end()) continue;
        double llm_cost = problem.distinct.at(u).at(i) * problem.sel_for_filter(i, S & ~(1u << i));
        DpValue cand{prev->second.llm + llm_cost, prev->second.rel};
        if (objective(cand) < objective(best)) {
          best = cand;
          best_choice.kind = Choice::Kind::Place;
          best_choice.filter = i;
        }
      }

      if (objective(best) < kInf) {
        st.value[S] = best;
        st.choice[S] = best_choice;
        if (state_trace) {
          state_trace->push_back("node=" + std::to_string(u) + " subset=" + std::to_string(S) +
                                 " llm=" + std::to_string(best.llm) + " rel=" + std::to_string(best.rel));
        }
      }
    }
  }

  uint32_t full = problem.full_mask();
  auto root_state = states[skeleton.root].value.find(full);
  if (root_state == states[skeleton.root].value.end()) {
    std::string blocked;
    for (size_t i = 0; i < n; ++i) {
      if (problem.legal_chain[i].size() == 1 && blocked.empty()) {
        blocked = std::to_string(problem.filters[i].filter_node);
      }
    }
    throw SemqlError(ErrorKind::Optimize, "no feasible placement for semantic filter " +
                                              (blocked.empty() ? std::string("set") : blocked));
  }

  Placement placement;
  placement.state_expansions = expansions;

  // traceback
  std::vector<std::pair<NodeId, uint32_t>> stack{{skeleton.root, full}};
  while (!stack.empty()) {
    auto [u, S] = stack.back();
    stack.pop_back();
    const Choice& choice = states[u].choice.at(S);
    switch (choice.kind) {
      case Choice::Kind::None:
        break;
      case Choice::Kind::Unary:
        stack.emplace_back(skeleton.node(u).children[0], S);
        break;
      case Choice::Kind::Binary:
        stack.emplace_back(skeleton.node(u).children[0], choice.left_mask);
        stack.emplace_back(skeleton.node(u).children[1], S & ~choice.left_mask);
        break;
      case Choice::Kind::Place: {
        placement.assignments[problem.filters[choice.filter].filter_node] = u;
        // unwinding visits the last-placed filter first
        auto& order = placement.stacking[u];
        order.insert(order.begin(), choice.filter);
        stack.emplace_back(u, S & ~(1u << choice.filter));
        break;
      }
    }
  }

  // canonical cost decomposition of the chosen placement
  std::map<NodeId, uint32_t> below;  // filters placed strictly below each node
  double llm = 0.0, rel = 0.0;
  for (NodeId u : problem.order) {
    uint32_t b = 0;
    for (NodeId child : skeleton.node(u).children) {
      b |= below.at(child);
      auto it = placement.stacking.find(child);
      if (it != placement.stacking.end()) {
        for (size_t i : it->second) b |= 1u << i;
      }
    }
    below[u] = b;
    rel += problem.relational_term(u, b);
    auto it = placement.stacking.find(u);
    if (it != placement.stacking.end()) {
      uint32_t placed = b;
      for (size_t i : it->second) {
        llm += problem.distinct.at(u).at(i) * problem.sel_for_filter(i, placed);
        placed |= 1u << i;
      }
    }
  }
  placement.estimated = CostEstimate::make(llm, rel, alpha);
  return placement;
}

PlanTree apply_placement(const PlanTree& simplified, const PlacementProblem& problem, const Placement& placement) {
  PlanTree tree = simplified;
  for (const auto& filter : problem.filters) {
    if (!placement.assignments.count(filter.filter_node)) {
      throw SemqlError(ErrorKind::Optimize,
                       "placement is missing filter " + std::to_string(filter.filter_node));
    }
  }
  // detach every semantic filter, then re-insert above its assigned node
  for (const auto& filter : problem.filters) detach_unary(tree, filter.filter_node);

  std::map<NodeId, std::vector<NodeId>> by_target;
  for (const auto& [filter_node, target] : placement.assignments) by_target[target].push_back(filter_node);
  for (auto& [target, list] : by_target) {
    std::sort(list.begin(), list.end());
    NodeId top = target;
    for (NodeId filter_node : list) {  // ascending id stacks bottom-to-top
      insert_above(tree, filter_node, top);
      top = filter_node;
    }
  }
  // projections crossed by a hoisted filter must keep its columns available
  repair_projections(tree);
  auto violations = validate(tree);
  if (!violations.empty()) {
    throw SemqlError(ErrorKind::Optimize, "placement produced an invalid tree: " + violations.front().message);
  }

  // range check against the problem's legality chains
  for (size_t i = 0; i < problem.filters.size(); ++i) {
    NodeId target = placement.assignments.at(problem.filters[i].filter_node);
    if (std::find(problem.legal_chain[i].begin(), problem.legal_chain[i].end(), target) ==
        problem.legal_chain[i].end()) {
      throw SemqlError(ErrorKind::Optimize, "assignment outside the filter's valid range");
    }
  }
  return tree;
}

}  // namespace semql
