#include "bench/sweeps.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include "common/error.hpp"
#include "exec/collect_stats.hpp"
#include "sql/parser.hpp"

namespace semql {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

std::string strategy_name(Strategy strategy) {
  switch (strategy) {
    case Strategy::None:
      return "none";
    case Strategy::Pullup:
      return "pullup";
    case Strategy::CostModel:
      return "costmodel";
  }
  return "none";
}

std::optional<Strategy> strategy_from_name(const std::string& name) {
  if (name == "none") return Strategy::None;
  if (name == "pullup") return Strategy::Pullup;
  if (name == "costmodel") return Strategy::CostModel;
  return std::nullopt;
}

OptimizeOutcome optimize_query(const PlanTree& parsed, Strategy strategy, const SelectivityModel& model,
                               const OptimizerConfig& config, const ExactStats& stats,
                               std::vector<std::string>* dp_trace) {
  OptimizeOutcome out;
  if (strategy == Strategy::None) {
    out.plan = parsed;
    return out;
  }
  auto start = Clock::now();
  PlanTree simplified = simplify_to_fixed_point(parsed, &out.rewrite_trace);
  out.simplify_ms = ms_since(start);

  if (strategy == Strategy::Pullup) {
    start = Clock::now();
    auto pulled = pull_up_all(simplified);
    out.placement_ms = ms_since(start);
    out.plan = std::move(pulled.tree);
    out.swaps = std::move(pulled.swaps);
    out.pullup_iterations = pulled.outer_iterations;
    return out;
  }

  size_t filter_count = 0;
  for (const auto& [id, node] : simplified.nodes) {
    if (node.kind == NodeKind::SemFilter) filter_count++;
  }
  if (filter_count > static_cast<size_t>(config.max_dp_filters)) {
    auto pulled = pull_up_all(simplified);
    out.plan = std::move(pulled.tree);
    out.swaps = std::move(pulled.swaps);
    out.pullup_iterations = pulled.outer_iterations;
    out.fell_back_to_pullup = true;
    return out;
  }

  start = Clock::now();
  PlacementProblem problem = build_placement_problem(simplified, model, config, stats);
  Placement placement = dp_place(problem, dp_trace);
  out.placement_ms = ms_since(start);
  out.plan = apply_placement(simplified, problem, placement);
  out.estimated = placement.estimated;
  out.placement = std::move(placement);
  return out;
}

uint64_t relational_rows_processed(const PlanTree& plan, const ExecutionMetrics& metrics) {
  uint64_t total = 0;
  for (const auto& [id, rows] : metrics.rows_per_node) {
    if (!plan.has_node(id)) continue;
    NodeKind kind = plan.node(id).kind;
    if (kind == NodeKind::SemFilter || kind == NodeKind::SemProject) continue;
    total += rows;
  }
  return total;
}

std::string placement_signature(const Placement& placement) {
  std::string out;
  for (const auto& [filter, node] : placement.assignments) {
    out += std::to_string(filter) + "@" + std::to_string(node) + ";";
  }
  return out;
}

CompareReport compare_strategies(const Workload& workload, const std::string& sql,
                                 const std::vector<Strategy>& strategies, const ExecOptions& exec_options) {
  if (strategies.size() < 2) throw SemqlError(ErrorKind::Execute, "compare needs at least 2 strategies");
  PlanTree parsed = parse(sql, workload.catalog);
  auto oracle = workload.make_mock_oracle();

  ExactStats stats;
  if (workload.inject_exact_stats) stats = collect_exact_stats(parsed, workload.data, *oracle);

  SelectivityModel model;
  OptimizerConfig config;
  config.alpha = workload.alpha;

  CompareReport report;
  std::optional<Relation> baseline_output;
  for (Strategy strategy : strategies) {
    auto outcome = optimize_query(parsed, strategy, model, config, stats);
    FunctionCache cache;
    auto result = execute(outcome.plan, workload.data, *oracle, cache, exec_options);
    StrategyMetrics row;
    row.strategy = strategy_name(strategy);
    row.llm_calls = result.metrics.llm_calls;
    row.rel_rows_processed = relational_rows_processed(outcome.plan, result.metrics);
    row.wall_ms = result.metrics.wall_ms;
    row.estimated = outcome.estimated;
    if (!baseline_output) {
      baseline_output = result.output;
    } else {
      row.equal_to_baseline = relations_equal(*baseline_output, result.output);
      row.f1_vs_baseline = row.equal_to_baseline ? 1.0 : multiset_f1(*baseline_output, result.output);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

void compute_bench_aggregates(BenchReport& report) {
  report.geo_speedup.clear();
  report.geo_call_reduction.clear();
  report.mean_f1.clear();
  if (report.queries.empty()) return;
  for (size_t s = 0; s < report.strategies.size(); ++s) {
    double log_speedup = 0, log_reduction = 0, f1_sum = 0;
    for (const auto& [name, rows] : report.queries) {
      const auto& baseline = rows[0];
      const auto& row = rows[s];
      double baseline_calls = std::max<double>(1.0, static_cast<double>(baseline.llm_calls));
      double calls = std::max<double>(1.0, static_cast<double>(row.llm_calls));
      log_speedup += std::log(baseline.wall_ms / row.wall_ms);
      log_reduction += std::log(baseline_calls / calls);
      f1_sum += row.f1_vs_baseline;
    }
    double count = static_cast<double>(report.queries.size());
    report.geo_speedup[report.strategies[s]] = std::exp(log_speedup / count);
    report.geo_call_reduction[report.strategies[s]] = std::exp(log_reduction / count);
    report.mean_f1[report.strategies[s]] = f1_sum / count;
  }
}

BenchReport run_bench(const Workload& workload, const std::vector<Strategy>& strategies) {
  BenchReport report;
  for (Strategy s : strategies) report.strategies.push_back(strategy_name(s));
  int index = 0;
  for (const auto& sql : workload.queries) {
    auto compare = compare_strategies(workload, sql, strategies);
    report.queries.emplace_back("q" + std::to_string(++index), std::move(compare.rows));
  }
  compute_bench_aggregates(report);
  return report;
}

void write_bench_csv(const BenchReport& report, const std::string& path) {
  std::ofstream out(path);
  out.precision(17);
  out << "query,strategy,llm_calls,rel_rows_processed,wall_ms,f1_vs_baseline\n";
  for (const auto& [name, rows] : report.queries) {
    for (const auto& row : rows) {
      out << name << ',' << row.strategy << ',' << row.llm_calls << ',' << row.rel_rows_processed << ','
          << row.wall_ms << ',' << row.f1_vs_baseline << '\n';
    }
  }
}

AlphaSweepReport sweep_alpha(const Workload& workload, const std::string& sql, const std::vector<double>& alpha_grid) {
  AlphaSweepReport report;
  PlanTree parsed = parse(sql, workload.catalog);
  auto oracle = workload.make_mock_oracle();
  ExactStats stats;
  if (workload.inject_exact_stats) stats = collect_exact_stats(parsed, workload.data, *oracle);
  SelectivityModel model;

  for (double alpha : alpha_grid) {
    OptimizerConfig config;
    config.alpha = alpha;
    auto outcome = optimize_query(parsed, Strategy::CostModel, model, config, stats);
    FunctionCache cache;
    auto result = execute(outcome.plan, workload.data, *oracle, cache);
    AlphaSweepRow row;
    row.alpha = alpha;
    row.estimated_llm = outcome.estimated ? outcome.estimated->llm_rows : 0;
    row.estimated_rel = outcome.estimated ? outcome.estimated->rel_rows : 0;
    row.executed_llm_calls = result.metrics.llm_calls;
    row.wall_ms = result.metrics.wall_ms;
    row.plan_signature = outcome.placement ? placement_signature(*outcome.placement) : "";
    if (report.regimes.empty() || report.regimes.back() != row.plan_signature) {
      report.regimes.push_back(row.plan_signature);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

void write_alpha_sweep_csv(const AlphaSweepReport& report, const std::string& path) {
  std::ofstream out(path);
  out << "alpha,estimated_llm,estimated_rel,executed_llm_calls,wall_ms,plan\n";
  for (const auto& row : report.rows) {
    out << row.alpha << ',' << row.estimated_llm << ',' << row.estimated_rel << ',' << row.executed_llm_calls << ','
        << row.wall_ms << ',' << row.plan_signature << '\n';
  }
}

SelectivityGridReport sweep_selectivity(const Workload& workload, const std::string& sql,
                                        const std::vector<double>& sf_grid, const std::vector<double>& join_grid) {
  SelectivityGridReport report;
  PlanTree parsed = parse(sql, workload.catalog);
  auto oracle = workload.make_mock_oracle();
  ExactStats stats;
  if (workload.inject_exact_stats) stats = collect_exact_stats(parsed, workload.data, *oracle);

  std::vector<std::string> seen;
  for (double sf_sel : sf_grid) {
    for (double join_sel : join_grid) {
      SelectivityModel model;
      model.default_sf_selectivity = sf_sel;
      model.join_distinct_selectivity = join_sel;
      OptimizerConfig config;
      config.alpha = workload.alpha;
      auto outcome = optimize_query(parsed, Strategy::CostModel, model, config, stats);
      FunctionCache cache;
      auto result = execute(outcome.plan, workload.data, *oracle, cache);
      SelectivityCell cell;
      cell.sf_selectivity = sf_sel;
      cell.join_selectivity = join_sel;
      cell.plan_signature = outcome.placement ? placement_signature(*outcome.placement) : "";
      cell.executed_llm_calls = result.metrics.llm_calls;
      cell.estimated_total = outcome.estimated ? outcome.estimated->total : 0;
      cell.wall_ms = result.metrics.wall_ms;
      if (std::find(seen.begin(), seen.end(), cell.plan_signature) == seen.end()) {
        seen.push_back(cell.plan_signature);
      }
      report.cells.push_back(std::move(cell));
    }
  }
  report.distinct_plans = seen.size();
  return report;
}

void write_selectivity_csv(const SelectivityGridReport& report, const std::string& path) {
  std::ofstream out(path);
  out << "sf_selectivity,join_selectivity,plan,executed_llm_calls,estimated_total,wall_ms\n";
  for (const auto& cell : report.cells) {
    out << cell.sf_selectivity << ',' << cell.join_selectivity << ',' << cell.plan_signature << ','
        << cell.executed_llm_calls << ',' << cell.estimated_total << ',' << cell.wall_ms << '\n';
  }
}

std::vector<OverheadRow> measure_optimizer_overhead(const Workload& workload) {
  std::vector<OverheadRow> rows;
  SelectivityModel model;
  OptimizerConfig config;
  config.alpha = workload.alpha;
  auto oracle = workload.make_mock_oracle();
  for (const auto& sql : workload.queries) {
    PlanTree parsed = parse(sql, workload.catalog);
    ExactStats stats;
    if (workload.inject_exact_stats) stats = collect_exact_stats(parsed, workload.data, *oracle);
    auto outcome = optimize_query(parsed, Strategy::CostModel, model, config, stats);
    OverheadRow row;
    for (const auto& [id, node] : parsed.nodes) {
      if (node.kind == NodeKind::SemFilter) row.filter_count++;
    }
    row.node_count = parsed.nodes.size();
    row.simplify_ms = outcome.simplify_ms;
    row.placement_ms = outcome.placement_ms;
    rows.push_back(row);
  }
  return rows;
}

void write_overhead_csv(const std::vector<OverheadRow>& rows, const std::string& path) {
  std::ofstream out(path);
  out << "semantic_filters,plan_nodes,simplify_ms,placement_ms\n";
  for (const auto& row : rows) {
    out << row.filter_count << ',' << row.node_count << ',' << row.simplify_ms << ',' << row.placement_ms << '\n';
  }
}

}  // namespace semql
