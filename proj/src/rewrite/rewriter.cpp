#include "rewrite/rewriter.hpp"

#include <algorithm>
#include <functional>

#include "common/error.hpp"

namespace semql {

bool DependencyGraph::has_cycle() const {
  std::map<NodeId, int> state;  // 0 unvisited, 1 on stack, 2 done
  std::function<bool(NodeId)> visit = [&](NodeId id) {
    state[id] = 1;
    auto it = edges.find(id);
    if (it != edges.end()) {
      for (NodeId next : it->second) {
        if (state[next] == 1) return true;
        if (state[next] == 0 && visit(next)) return true;
      }
    }
    state[id] = 2;
    return false;
  };
  for (const auto& [id, targets] : edges) {
    if (state[id] == 0 && visit(id)) return true;
  }
  return false;
}

DependencyGraph build_dependency_graph(const PlanTree& tree) {
  // producers of derived columns
  std::map<std::string, NodeId> producer;
  for (const auto& [id, node] : tree.nodes) {
    if (node.kind == NodeKind::SemProject) {
      producer[std::get<SemProjectPayload>(node.payload).output_name] = id;
    } else if (node.kind == NodeKind::Aggregate) {
      for (const auto& agg : std::get<AggregatePayload>(node.payload).aggregates) producer[agg.output_name] = id;
    }
  }
  DependencyGraph graph;
  for (const auto& [id, node] : tree.nodes) {
    for (const auto& ref : node.referenced_columns()) {
      if (!ref.table.empty()) continue;
      auto it = producer.find(ref.column);
      if (it != producer.end() && it->second != id) graph.edges[id].insert(it->second);
    }
  }
  return graph;
}

NodeId output_projection(const PlanTree& tree) {
  NodeId cur = tree.root;
  while (true) {
    const PlanNode& node = tree.node(cur);
    if (node.kind == NodeKind::Project) return cur;
    if (is_block_operator(node.kind) && node.children.size() == 1) {
      cur = node.children[0];
      continue;
    }
    return 0;
  }
}

namespace {

bool schema_covers(const PlanTree& tree, NodeId node, const std::vector<ColumnRef>& refs) {
  auto schema = output_schema(tree, node);
  for (const auto& ref : refs) {
    bool found = false;
    for (const auto& col : schema) {
      if (col.table == ref.table && col.name == ref.column) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

// Lowest feasible position for a relational filter below `start`. The walk
// crosses the node it stands on only when that node is a semantic operator,
// projection, or join (descending into the covering side); block operators
// and other relational filters are never crossed, and a projection whose
// derived column the filter references stops the walk via the coverage
// check.
NodeId descend_for_filter(const PlanTree& tree, NodeId start, const std::vector<ColumnRef>& refs) {
  NodeId cur = start;
  while (true) {
    const PlanNode& node = tree.node(cur);
    if (is_block_operator(node.kind) || node.kind == NodeKind::RelFilter || node.kind == NodeKind::TableScan) {
      return cur;
    }
    NodeId pick = 0;
    bool picked = false;
    for (NodeId child : node.children) {
      if (schema_covers(tree, child, refs)) {
        pick = child;
        picked = true;
        break;
      }
    }
    if (!picked) return cur;
    cur = pick;
  }
}

}  // namespace

bool push_down_relational_filters(PlanTree& tree, RewriteTrace* trace) {
  bool any = false;
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<NodeId> filters;
    for (const auto& [id, node] : tree.nodes) {
      if (node.kind == NodeKind::RelFilter) filters.push_back(id);
    }
    for (NodeId id : filters) {
      const PlanNode& node = tree.node(id);
      auto refs = node.referenced_columns();
      NodeId child = node.children[0];
      NodeId attach = descend_for_filter(tree, child, refs);
      if (attach == child) continue;
      detach_unary(tree, id);
      insert_above(tree, id, attach);
      changed = true;
      any = true;
      if (trace) trace->steps.push_back({"filter_pushdown", {id, attach}});
    }
  }
  return any;
}

bool decompose_semantic_joins(PlanTree& tree, RewriteTrace* trace) {
  bool any = false;
  for (auto& [id, node] : tree.nodes) {
    if (node.kind != NodeKind::InnerJoin) continue;
    if (!std::get<InnerJoinPayload>(node.payload).keys.empty()) continue;
    node.kind = NodeKind::CrossJoin;
    node.payload = CrossJoinPayload{true};
    any = true;
    if (trace) trace->steps.push_back({"sj_decompose", {id}});
  }
  return any;
}

namespace {

struct PullUpPlan {
  NodeId stack_base = 0;           // node the moved stack is re-inserted above
  std::vector<NodeId> dependents;  // original bottom-up order
  std::vector<NodeId> crossed_projects;
};

std::optional<PullUpPlan> plan_sp_pull_up(const PlanTree& tree, NodeId sp_id, NodeId ceiling) {
  const PlanNode& sp = tree.node(sp_id);
  const std::string output_name = std::get<SemProjectPayload>(sp.payload).output_name;
  auto parents = tree.parent_map();

  std::vector<std::string> moving_outputs{output_name};
  auto references_moving = [&](const PlanNode& node) {
    for (const auto& ref : node.referenced_columns()) {
      if (!ref.table.empty()) continue;
      if (std::find(moving_outputs.begin(), moving_outputs.end(), ref.column) != moving_outputs.end()) return true;
    }
    return false;
  };

  PullUpPlan plan;
  plan.stack_base = sp.children[0];
  NodeId cur = sp_id;
  while (parents.count(cur)) {
    NodeId p = parents.at(cur);
    const PlanNode& pnode = tree.node(p);
    if (p == ceiling || is_block_operator(pnode.kind)) break;
    if (references_moving(pnode)) {
      if (pnode.children.size() != 1) break;  // a dependent join pins the projection
      plan.dependents.push_back(p);
      if (pnode.kind == NodeKind::SemProject) {
        moving_outputs.push_back(std::get<SemProjectPayload>(pnode.payload).output_name);
      }
      cur = p;
      continue;
    }
    // crossable: stays below the moved stack
    plan.stack_base = p;
    if (pnode.kind == NodeKind::Project) plan.crossed_projects.push_back(p);
    cur = p;
  }
  if (plan.stack_base == sp.children[0]) return std::nullopt;  // nothing to cross
  return plan;
}

}  // namespace

bool pull_up_semantic_projections(PlanTree& tree, RewriteTrace* trace) {
  if (build_dependency_graph(tree).has_cycle()) {
    throw SemqlError(ErrorKind::Optimize, "column dependency cycle; input plan is invalid");
  }
  bool any = false;
  bool changed = true;
  size_t guard = 0;
  while (changed) {
    changed = false;
    NodeId ceiling = output_projection(tree);
    std::vector<NodeId> sps;
    for (const auto& [id, node] : tree.nodes) {
      if (node.kind == NodeKind::SemProject) sps.push_back(id);
    }
    if (++guard > sps.size() * tree.nodes.size() + 2) {
      throw SemqlError(ErrorKind::Internal, "semantic projection pull-up did not converge");
    }
    for (NodeId sp_id : sps) {
      auto plan = plan_sp_pull_up(tree, sp_id, ceiling);
      if (!plan) continue;

      const PlanNode& sp = tree.node(sp_id);
      const std::string output_name = std::get<SemProjectPayload>(sp.payload).output_name;
      const auto sp_inputs = sp.referenced_columns();

      // crossed projections lose the projection's output column and gain its
      // input columns
      for (NodeId proj : plan->crossed_projects) {
        auto& cols = std::get<ProjectPayload>(tree.node(proj).payload).columns;
        cols.erase(std::remove(cols.begin(), cols.end(), ColumnRef{"", output_name}), cols.end());
        for (const auto& ref : sp_inputs) {
          if (std::find(cols.begin(), cols.end(), ref) == cols.end()) cols.push_back(ref);
        }
      }

      for (auto it = plan->dependents.rbegin(); it != plan->dependents.rend(); ++it) detach_unary(tree, *it);
      detach_unary(tree, sp_id);
      insert_above(tree, sp_id, plan->stack_base);
      NodeId top = sp_id;
      for (NodeId dep : plan->dependents) {
        insert_above(tree, dep, top);
        top = dep;
      }
      repair_projections(tree);
      changed = true;
      any = true;
      if (trace) trace->steps.push_back({"sp_pullup", {sp_id, plan->stack_base}});
    }
  }
  return any;
}

PlanTree simplify_to_fixed_point(const PlanTree& input, RewriteTrace* trace) {
  PlanTree tree = input;
  size_t sp_count = 0, sj_count = 0;
  for (const auto& [id, node] : tree.nodes) {
    if (node.kind == NodeKind::SemProject) sp_count++;
    if (node.kind == NodeKind::InnerJoin && std::get<InnerJoinPayload>(node.payload).keys.empty()) sj_count++;
  }
  const size_t bound = tree.nodes.size() * (sp_count + sj_count) + 2;

  push_down_relational_filters(tree, trace);
  size_t iterations = 0;
  while (true) {
    bool c1 = pull_up_semantic_projections(tree, trace);
    bool c2 = decompose_semantic_joins(tree, trace);
    if (c2) push_down_relational_filters(tree, trace);
    if (!c1 && !c2) break;
    if (++iterations > bound) {
      throw SemqlError(ErrorKind::Internal, "simplification exceeded its iteration bound; rewrite bug");
    }
  }
  auto violations = validate(tree);
  if (!violations.empty()) {
    throw SemqlError(ErrorKind::Internal, "simplified tree invalid: " + violations.front().message);
  }
  return tree;
}

}  // namespace semql
