#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bench/workload.hpp"
#include "cost/cost_model.hpp"
#include "exec/compare.hpp"
#include "place/dp_placer.hpp"
#include "rewrite/pullup.hpp"
#include "rewrite/rewriter.hpp"

namespace semql {

enum class Strategy { None, Pullup, CostModel };

std::string strategy_name(Strategy strategy);
std::optional<Strategy> strategy_from_name(const std::string& name);

struct OptimizeOutcome {
  PlanTree plan;
  RewriteTrace rewrite_trace;
  std::vector<SwapRecord> swaps;          // pullup
  size_t pullup_iterations = 0;
  std::optional<Placement> placement;     // costmodel
  std::optional<CostEstimate> estimated;  // costmodel
  double simplify_ms = 0;
  double placement_ms = 0;
  bool fell_back_to_pullup = false;       // filter count beyond the bitmask cap
};

// parse output -> simplify -> strategy pass. `none` keeps the parsed tree
// (the function-caching-only baseline). `dp_trace`, when given, receives the
// cost model's per-state lines.
OptimizeOutcome optimize_query(const PlanTree& parsed, Strategy strategy, const SelectivityModel& model,
                               const OptimizerConfig& config, const ExactStats& stats,
                               std::vector<std::string>* dp_trace = nullptr);

struct StrategyMetrics {
  std::string strategy;
  uint64_t llm_calls = 0;
  uint64_t rel_rows_processed = 0;  // output rows summed over relational operators
  double wall_ms = 0;
  double f1_vs_baseline = 1.0;
  bool equal_to_baseline = true;
  std::optional<CostEstimate> estimated;
};

struct CompareReport {
  std::vector<StrategyMetrics> rows;  // first row is the baseline
};

CompareReport compare_strategies(const Workload& workload, const std::string& sql,
                                 const std::vector<Strategy>& strategies, const ExecOptions& exec_options = {});

// Per-query strategy comparison over a whole workload, with aggregates vs
// the first strategy: geometric-mean speedup, geometric-mean LLM-call
// reduction, and mean F1.
struct BenchReport {
  std::vector<std::string> strategies;
  std::vector<std::pair<std::string, std::vector<StrategyMetrics>>> queries;
  std::map<std::string, double> geo_speedup;
  std::map<std::string, double> geo_call_reduction;
  std::map<std::string, double> mean_f1;
};

BenchReport run_bench(const Workload& workload, const std::vector<Strategy>& strategies);
void write_bench_csv(const BenchReport& report, const std::string& path);

// Recomputes the aggregates from per-query rows; write_bench_csv emits
// enough precision that a read-back recomputation is exact.
void compute_bench_aggregates(BenchReport& report);

struct AlphaSweepRow {
  double alpha = 0;
  double estimated_llm = 0;
  double estimated_rel = 0;
  uint64_t executed_llm_calls = 0;
  double wall_ms = 0;
  std::string plan_signature;  // filter -> node assignment, serialized
};

struct AlphaSweepReport {
  std::vector<AlphaSweepRow> rows;
  std::vector<std::string> regimes;  // distinct plan signatures in grid order
};

AlphaSweepReport sweep_alpha(const Workload& workload, const std::string& sql, const std::vector<double>& alpha_grid);
void write_alpha_sweep_csv(const AlphaSweepReport& report, const std::string& path);

struct SelectivityCell {
  double sf_selectivity = 0;
  double join_selectivity = 0;
  std::string plan_signature;
  uint64_t executed_llm_calls = 0;
  double estimated_total = 0;
  double wall_ms = 0;
};

struct SelectivityGridReport {
  std::vector<SelectivityCell> cells;
  size_t distinct_plans = 0;
};

SelectivityGridReport sweep_selectivity(const Workload& workload, const std::string& sql,
                                        const std::vector<double>& sf_grid, const std::vector<double>& join_grid);
void write_selectivity_csv(const SelectivityGridReport& report, const std::string& path);

struct OverheadRow {
  size_t filter_count = 0;
  size_t node_count = 0;
  double simplify_ms = 0;
  double placement_ms = 0;
};

// per-query optimizer timing on the overhead preset, grouped by the number
// of semantic filters
std::vector<OverheadRow> measure_optimizer_overhead(const Workload& workload);
void write_overhead_csv(const std::vector<OverheadRow>& rows, const std::string& path);

uint64_t relational_rows_processed(const PlanTree& plan, const ExecutionMetrics& metrics);
std::string placement_signature(const Placement& placement);

}  // namespace semql
