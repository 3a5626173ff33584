#include "rewrite/pullup.hpp"

#include <algorithm>
#include <functional>

#include "common/error.hpp"
#include "rewrite/rewriter.hpp"

namespace semql {

namespace {

size_t tree_depth(const PlanTree& tree) {
  std::function<size_t(NodeId)> walk = [&](NodeId id) -> size_t {
    size_t best = 0;
    for (NodeId child : tree.node(id).children) best = std::max(best, walk(child));
    return best + 1;
  };
  return walk(tree.root);
}

}  // namespace

PullUpResult pull_up_all(const PlanTree& input) {
  PullUpResult result;
  result.tree = input;
  PlanTree& tree = result.tree;

  std::vector<NodeId> filters;
  for (const auto& [id, node] : tree.nodes) {
    if (node.kind == NodeKind::SemFilter) filters.push_back(id);
  }
  if (filters.empty()) return result;

  const NodeId ceiling = output_projection(tree);
  const size_t iteration_bound = filters.size() * tree_depth(tree) + 1;

  bool changed = true;
  while (changed) {
    changed = false;
    result.outer_iterations++;
    if (result.outer_iterations > iteration_bound) {
      throw SemqlError(ErrorKind::Internal, "pull-up exceeded its termination bound");
    }
    for (NodeId sf : filters) {
      auto parents = tree.parent_map();
      auto it = parents.find(sf);
      if (it == parents.end()) continue;  // filter is the root
      NodeId parent_id = it->second;
      if (parent_id == ceiling) continue;
      const PlanNode& parent = tree.node(parent_id);
      if (is_block_operator(parent.kind)) continue;
      if (parent.kind == NodeKind::SemFilter || parent.kind == NodeKind::SemProject) continue;
      if (parent_id == tree.root) continue;
      if (parent.kind == NodeKind::Project) {
        auto& cols = std::get<ProjectPayload>(tree.node(parent_id).payload).columns;
        for (const auto& ref : tree.node(sf).referenced_columns()) {
          if (std::find(cols.begin(), cols.end(), ref) == cols.end()) cols.push_back(ref);
        }
      }
      swap_with_parent(tree, sf);
      result.swaps.push_back({sf, parent_id});
      changed = true;
    }
  }
  return result;
}

}  // namespace semql
