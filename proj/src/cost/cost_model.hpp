#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "plan/plan_tree.hpp"

namespace semql {

// Selectivity defaults: s_i = 0.2 per semantic filter, s_join = 0.1 per
// inner join on a distinct-count path, cross join fixed at 1.
struct SelectivityModel {
  double default_sf_selectivity = 0.2;
  double join_distinct_selectivity = 0.1;
  std::map<NodeId, double> per_filter_overrides;
  static constexpr double cross_join_selectivity = 1.0;

  double filter_selectivity(NodeId filter_node) const {
    auto it = per_filter_overrides.find(filter_node);
    return it == per_filter_overrides.end() ? default_sf_selectivity : it->second;
  }
};

struct OptimizerConfig {
  double alpha = 1e-7;              // weight converting relational rows to LLM-call units
  double cache_probe_cost = 1.0;    // row-equivalents per cache probe
  double rel_filter_selectivity = 0.3;  // default per relational conjunct
  int max_dp_filters = 20;          // bitmask width cap
};

// Optional exact statistics; entries override every estimate they cover.
struct ExactStats {
  std::map<std::string, double> table_rows;
  std::map<NodeId, double> node_rows;
  std::map<NodeId, std::map<std::string, double>> node_distinct;  // per (node, base table)
};

struct CostEstimate {
  double llm_rows = 0;
  double rel_rows = 0;
  double total = 0;  // llm_rows + alpha * rel_rows, exactly

  static CostEstimate make(double llm_rows, double rel_rows, double alpha) {
    return CostEstimate{llm_rows, rel_rows, llm_rows + alpha * rel_rows};
  }
};

// A movable semantic filter, collected after simplification.
struct SemanticFilterDescriptor {
  NodeId filter_node = 0;
  SemanticPredicate predicate;
  std::set<std::string> referenced_tables;  // ref(SF_i)
  NodeId original_position = 0;             // lowest non-SemFilter descendant it sits above
  double selectivity = 0.2;
};

// Descriptors for every SemFilter in the tree, ordered by node id.
std::vector<SemanticFilterDescriptor> collect_semantic_filters(const PlanTree& tree, const SelectivityModel& model);

// Product of s_i over filters in `selected` whose referenced tables
// intersect `tables`; the empty product is 1.
double combined_selectivity(const std::set<std::string>& tables, const std::vector<size_t>& selected,
                            const std::vector<SemanticFilterDescriptor>& filters);

// c(u): estimated output cardinality at `node`, ignoring all semantic
// filters but honoring relational filters and joins below. node_rows /
// table_rows in `stats` override the formulas.
double relational_cost(const PlanTree& tree, NodeId node, const OptimizerConfig& config, const ExactStats& stats);

// N_{u,SF}: estimated distinct rows at `node` projected onto the filter's
// referenced tables. Statistics-free path model: per referenced table,
// |base| times s_j for each semantic filter and s_join for each inner join
// on the path from the table's scan up to `node` (cross joins contribute 1);
// multi-table filters take the product across their tables. Exact
// node_distinct entries override the walk.
double distinct_count(const PlanTree& tree, NodeId node, const SemanticFilterDescriptor& filter,
                      const SelectivityModel& model, const ExactStats& stats);

// Estimated cache-probe row-equivalents charged at a join: estimated join
// output rows x (# SemFilter ancestors of the join) x config.cache_probe_cost.
double cache_probe_cost(const PlanTree& tree, NodeId join_node, const OptimizerConfig& config,
                        const ExactStats& stats);

}  // namespace semql
