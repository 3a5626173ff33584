#include "cost/cost_model.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace semql {

std::vector<SemanticFilterDescriptor> collect_semantic_filters(const PlanTree& tree, const SelectivityModel& model) {
  std::vector<SemanticFilterDescriptor> out;
  for (const auto& [id, node] : tree.nodes) {
    if (node.kind != NodeKind::SemFilter) continue;
    const auto& payload = std::get<SemFilterPayload>(node.payload);
    SemanticFilterDescriptor desc;
    desc.filter_node = id;
    desc.predicate = payload.predicate;
    desc.referenced_tables = payload.predicate.referenced_tables();
    NodeId below = node.children.empty() ? id : node.children[0];
    while (tree.node(below).kind == NodeKind::SemFilter) below = tree.node(below).children[0];
    desc.original_position = below;
    desc.selectivity = payload.selectivity ? *payload.selectivity : model.filter_selectivity(id);
    out.push_back(std::move(desc));
  }
  return out;  // map iteration keeps node-id order
}

double combined_selectivity(const std::set<std::string>& tables, const std::vector<size_t>& selected,
                            const std::vector<SemanticFilterDescriptor>& filters) {
  double out = 1.0;
  for (size_t i : selected) {
    if (i >= filters.size()) throw SemqlError(ErrorKind::Optimize, "unknown filter index in selectivity");
    const auto& refs = filters[i].referenced_tables;
    bool touches = false;
    for (const auto& t : refs) {
      if (tables.count(t)) {
        touches = true;
        break;
      }
    }
    if (touches) out *= filters[i].selectivity;
  }
  return out;
}

namespace {

double table_cardinality(const PlanTree& tree, const std::string& table, const ExactStats& stats) {
  auto it = stats.table_rows.find(table);
  if (it != stats.table_rows.end()) return it->second;
  auto cat = tree.catalog.tables.find(table);
  if (cat == tree.catalog.tables.end()) throw SemqlError(ErrorKind::Optimize, "unknown table '" + table + "'");
  if (cat->second.row_count) return static_cast<double>(*cat->second.row_count);
  return 1000.0;  // documented default when no statistics exist
}

}  // namespace

double relational_cost(const PlanTree& tree, NodeId id, const OptimizerConfig& config, const ExactStats& stats) {
  auto exact = stats.node_rows.find(id);
  if (exact != stats.node_rows.end()) return exact->second;
  const PlanNode& node = tree.node(id);
  switch (node.kind) {
    case NodeKind::TableScan:
      return table_cardinality(tree, std::get<TableScanPayload>(node.payload).table, stats);
    case NodeKind::RelFilter: {
      double input = relational_cost(tree, node.children[0], config, stats);
      size_t conjuncts = std::get<RelFilterPayload>(node.payload).conjuncts.size();
      return input * std::pow(config.rel_filter_selectivity, static_cast<double>(conjuncts));
    }
    case NodeKind::InnerJoin: {
      double left = relational_cost(tree, node.children[0], config, stats);
      double right = relational_cost(tree, node.children[1], config, stats);
      if (std::get<InnerJoinPayload>(node.payload).keys.empty()) return left * right;
      // key-based estimate with per-side distinct counts defaulting to the
      // side cardinalities
      return left * right / std::max(1.0, std::max(left, right));
    }
    case NodeKind::CrossJoin: {
      double left = relational_cost(tree, node.children[0], config, stats);
      double right = relational_cost(tree, node.children[1], config, stats);
      return left * right;
    }
    case NodeKind::Limit: {
      double input = relational_cost(tree, node.children[0], config, stats);
      return std::min(input, static_cast<double>(std::get<LimitPayload>(node.payload).count));
    }
    case NodeKind::Union:
      return relational_cost(tree, node.children[0], config, stats) +
             relational_cost(tree, node.children[1], config, stats);
    case NodeKind::SemFilter:
      // c(u) ignores semantic filters entirely
      return relational_cost(tree, node.children[0], config, stats);
    default:
      // Project, Sort, SemProject, Aggregate: cardinality-preserving
      // estimates (Aggregate's input count is its upper bound)
      return relational_cost(tree, node.children[0], config, stats);
  }
}

double distinct_count(const PlanTree& tree, NodeId node_id, const SemanticFilterDescriptor& filter,
                      const SelectivityModel& model, const ExactStats& stats) {
  if (filter.referenced_tables.empty()) {
    throw SemqlError(ErrorKind::Optimize, "semantic filter references no base tables");
  }
  auto under = tables_under(tree, node_id);
  for (const auto& table : filter.referenced_tables) {
    if (!under.count(table)) {
      throw SemqlError(ErrorKind::Optimize, "node is not above the filter's table '" + table + "'");
    }
  }

  auto exact_node = stats.node_distinct.find(node_id);
  auto parents = tree.parent_map();

  double out = 1.0;
  for (const auto& table : filter.referenced_tables) {
    if (exact_node != stats.node_distinct.end()) {
      auto it = exact_node->second.find(table);
      if (it != exact_node->second.end()) {
        out *= it->second;
        continue;
      }
    }
    // find the table's scan inside the node's subtree
    NodeId scan = 0;
    bool found = false;
    for (NodeId candidate : tree.subtree(node_id)) {
      const PlanNode& n = tree.node(candidate);
      if (n.kind == NodeKind::TableScan && std::get<TableScanPayload>(n.payload).table == table) {
        scan = candidate;
        found = true;
        break;
      }
    }
    if (!found) throw SemqlError(ErrorKind::Optimize, "scan of '" + table + "' not found under node");
    double count = table_cardinality(tree, table, stats);
    NodeId cur = scan;
    while (cur != node_id) {
      cur = parents.at(cur);
      const PlanNode& n = tree.node(cur);
      if (n.kind == NodeKind::InnerJoin) {
        count *= model.join_distinct_selectivity;
      } else if (n.kind == NodeKind::CrossJoin) {
        count *= SelectivityModel::cross_join_selectivity;
      } else if (n.kind == NodeKind::SemFilter && cur != filter.filter_node) {
        const auto& payload = std::get<SemFilterPayload>(n.payload);
        count *= payload.selectivity ? *payload.selectivity : model.filter_selectivity(cur);
      }
    }
    out *= count;
  }
  return out;
}

double cache_probe_cost(const PlanTree& tree, NodeId join_node, const OptimizerConfig& config,
                        const ExactStats& stats) {
  const PlanNode& node = tree.node(join_node);
  if (node.kind != NodeKind::InnerJoin && node.kind != NodeKind::CrossJoin) {
    throw SemqlError(ErrorKind::Optimize, "cache_probe_cost expects a join node");
  }
  auto parents = tree.parent_map();
  int ancestor_filters = 0;
  NodeId cur = join_node;
  while (parents.count(cur)) {
    cur = parents.at(cur);
    if (tree.node(cur).kind == NodeKind::SemFilter) ancestor_filters++;
  }
  if (ancestor_filters == 0) return 0.0;
  double output = relational_cost(tree, join_node, config, stats);
  return output * static_cast<double>(ancestor_filters) * config.cache_probe_cost;
}

}  // namespace semql
