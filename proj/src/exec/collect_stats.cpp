#include "exec/collect_stats.hpp"

#include <set>

namespace semql {

PlanTree strip_semantic_filters(const PlanTree& tree) {
  PlanTree out = tree;
  std::vector<NodeId> filters;
  for (const auto& [id, node] : out.nodes) {
    if (node.kind == NodeKind::SemFilter) filters.push_back(id);
  }
  for (NodeId id : filters) {
    detach_unary(out, id);
    out.nodes.erase(id);
  }
  return out;
}

ExactStats collect_exact_stats(const PlanTree& tree, const Dataset& data, SemanticOracle& oracle) {
  PlanTree skeleton = strip_semantic_filters(tree);
  ExactStats stats;
  for (const auto& [table, relation] : data) {
    stats.table_rows[table] = static_cast<double>(relation.rows.size());
  }

  for (NodeId id : skeleton.postorder()) {
    PlanTree fragment;
    fragment.catalog = skeleton.catalog;
    fragment.root = id;
    for (NodeId n : skeleton.subtree(id)) fragment.nodes[n] = skeleton.node(n);
    FunctionCache cache;
    auto result = execute(fragment, data, oracle, cache);
    stats.node_rows[id] = static_cast<double>(result.output.rows.size());

    for (const auto& table : tables_under(skeleton, id)) {
      std::vector<int> columns;
      for (size_t i = 0; i < result.output.schema.size(); ++i) {
        if (result.output.schema[i].table == table) columns.push_back(static_cast<int>(i));
      }
      if (columns.empty()) continue;
      std::set<std::string> distinct;
      for (const auto& row : result.output.rows) {
        bool all_null = true;
        std::string key;
        for (int c : columns) {
          if (!is_null(row[c])) all_null = false;
          key += is_null(row[c]) ? std::string("\x01") : canonical_text(row[c]);
          key.push_back('\x1f');
        }
        if (!all_null) distinct.insert(key);
      }
      stats.node_distinct[id][table] = static_cast<double>(distinct.size());
    }
  }
  return stats;
}

}  // namespace semql
