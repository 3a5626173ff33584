#pragma once

#include <map>
#include <string>

#include "exec/function_cache.hpp"
#include "exec/oracle.hpp"
#include "exec/relation.hpp"
#include "plan/plan_tree.hpp"

namespace semql {

struct ExecutionMetrics {
  uint64_t llm_calls = 0;  // equals cache misses
  uint64_t cache_hits = 0;
  uint64_t cache_probes = 0;  // hits + misses
  std::map<NodeId, uint64_t> rows_per_node;       // output rows per operator
  std::map<NodeId, uint64_t> llm_calls_per_node;  // oracle invocations per semantic operator
  uint64_t sp_parse_warnings = 0;
  double wall_ms = 0;
};

struct ExecOptions {
  size_t batch_size = 1024;  // internal constant, no semantic effect
  bool parallel_semantic_eval = false;
  size_t threads = 4;
};

struct ExecResult {
  Relation output;
  ExecutionMetrics metrics;
};

using Dataset = std::map<std::string, Relation>;

// Bottom-up multiset evaluation. Semantic filters keep rows the oracle judges
// true, with per-distinct-prompt caching; rows whose referenced columns are
// all null trigger no call and are excluded from SF output (NULL is not
// true). Semantic projections append the oracle's typed output column and
// preserve cardinality (all-null inputs yield a NULL output, no call).
ExecResult execute(const PlanTree& tree, const Dataset& data, SemanticOracle& oracle, FunctionCache& cache,
                   const ExecOptions& options = {});

// Substitutes canonical value text into the template; nullopt when every
// referenced value is null (the null marker: no call is made).
std::optional<std::string> render_prompt(const SemanticPredicate& predicate, const Row& row,
                                         const std::vector<int>& column_indexes);

// Exact d_C: the number of distinct non-null rendered prompts the filter
// would receive if evaluated directly above `at`, measured by materializing
// the intermediate result there (with the filter's own node spliced out).
// Errors if `at` lies outside the filter's legal range (a block operator on
// the path from its current position).
uint64_t count_distinct_inputs(const PlanTree& tree, NodeId filter_node, NodeId at, const Dataset& data,
                               SemanticOracle& oracle);

}  // namespace semql
