#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bench/sweeps.hpp"
#include "bench/workload.hpp"
#include "common/error.hpp"
#include "exec/collect_stats.hpp"
#include "exec/csv_io.hpp"
#include "plan/plan_json.hpp"
#include "sql/parser.hpp"
#include "sql/render_sql.hpp"

namespace {

using nlohmann::json;
using namespace semql;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SemqlError(ErrorKind::Execute, "cannot open file '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SemqlError(ErrorKind::Execute, "cannot open file '" + path + "'");
  json j;
  in >> j;
  return j;
}

void emit(const json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << dump_canonical(j);
  } else {
    std::ofstream out(out_path);
    out << dump_canonical(j);
  }
}

struct CommonInputs {
  std::string sql_path;
  std::string plan_path;
  std::string catalog_path;
  std::string data_dir;
  std::string stats_path;
  std::string config_path;
  std::string oracle_spec = "mock:seed=42,sel=0.2";
  std::string out_path;
  double alpha = -1;     // negative: not set on the command line
  double sf_sel = -1;
  double join_sel = -1;
  uint64_t seed = 0;
  bool seed_set = false;
  bool verbose = false;
};

Catalog resolve_catalog(const CommonInputs& in) {
  if (!in.catalog_path.empty()) return catalog_from_json(read_json_file(in.catalog_path));
  if (!in.data_dir.empty()) return load_dataset_catalog(in.data_dir);
  throw SemqlError(ErrorKind::Bind, "a catalog is required (--catalog or --data)");
}

PlanTree resolve_plan(const CommonInputs& in) {
  if (!in.plan_path.empty()) {
    PlanTree tree = tree_from_json(read_json_file(in.plan_path));
    auto violations = validate(tree);
    if (!violations.empty()) {
      throw SemqlError(ErrorKind::Bind, "plan invalid: " + violations.front().message);
    }
    return tree;
  }
  if (in.sql_path.empty()) throw SemqlError(ErrorKind::Parse, "--sql or --plan is required");
  return parse(read_file(in.sql_path), resolve_catalog(in));
}

// flag > file > default precedence
void resolve_model(const CommonInputs& in, SelectivityModel& model, OptimizerConfig& config) {
  if (!in.config_path.empty()) {
    json j = read_json_file(in.config_path);
    if (j.contains("alpha")) config.alpha = j.at("alpha").get<double>();
    if (j.contains("sf_selectivity")) model.default_sf_selectivity = j.at("sf_selectivity").get<double>();
    if (j.contains("join_selectivity")) model.join_distinct_selectivity = j.at("join_selectivity").get<double>();
    if (j.contains("cache_probe_cost")) config.cache_probe_cost = j.at("cache_probe_cost").get<double>();
    if (j.contains("overrides")) {
      for (auto it = j.at("overrides").begin(); it != j.at("overrides").end(); ++it) {
        model.per_filter_overrides[static_cast<NodeId>(std::stoul(it.key()))] = it.value().get<double>();
      }
    }
  }
  if (in.alpha >= 0) config.alpha = in.alpha;
  if (in.sf_sel >= 0) model.default_sf_selectivity = in.sf_sel;
  if (in.join_sel >= 0) model.join_distinct_selectivity = in.join_sel;
}

ExactStats resolve_stats(const CommonInputs& in) {
  ExactStats stats;
  if (in.stats_path.empty()) return stats;
  json j = read_json_file(in.stats_path);
  if (j.contains("table_rows")) {
    for (auto it = j.at("table_rows").begin(); it != j.at("table_rows").end(); ++it) {
      stats.table_rows[it.key()] = it.value().get<double>();
    }
  }
  if (j.contains("node_rows")) {
    for (auto it = j.at("node_rows").begin(); it != j.at("node_rows").end(); ++it) {
      stats.node_rows[static_cast<NodeId>(std::stoul(it.key()))] = it.value().get<double>();
    }
  }
  if (j.contains("node_distinct")) {
    for (auto it = j.at("node_distinct").begin(); it != j.at("node_distinct").end(); ++it) {
      for (auto t = it.value().begin(); t != it.value().end(); ++t) {
        stats.node_distinct[static_cast<NodeId>(std::stoul(it.key()))][t.key()] = t.value().get<double>();
      }
    }
  }
  return stats;
}

json metrics_to_json(const PlanTree& plan, const ExecutionMetrics& metrics) {
  json rows = json::object();
  for (const auto& [id, count] : metrics.rows_per_node) rows[std::to_string(id)] = count;
  json calls = json::object();
  for (const auto& [id, count] : metrics.llm_calls_per_node) calls[std::to_string(id)] = count;
  return json{{"cache_hits", metrics.cache_hits},
              {"cache_probes", metrics.cache_probes},
              {"llm_calls", metrics.llm_calls},
              {"llm_calls_per_node", calls},
              {"rel_rows_processed", relational_rows_processed(plan, metrics)},
              {"rows_per_node", rows},
              {"sp_parse_warnings", metrics.sp_parse_warnings},
              {"timing", json{{"wall_ms", metrics.wall_ms}}}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimizer and executor for hybrid semantic-relational query plans"};
  app.require_subcommand(1);

  CommonInputs in;
  std::string strategy_text = "costmodel";
  std::string stage;
  std::string strategies_text = "none,pullup,costmodel";
  std::string preset_path;
  std::string out_dir = ".";
  std::string out_format;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--sql", in.sql_path, "SQL file");
    cmd->add_option("--plan", in.plan_path, "plan JSON file");
    cmd->add_option("--catalog", in.catalog_path, "catalog JSON file");
    cmd->add_option("--data", in.data_dir, "dataset directory");
    cmd->add_option("--stats", in.stats_path, "exact statistics JSON file");
    cmd->add_option("--config", in.config_path, "optimizer config JSON file");
    cmd->add_option("--oracle", in.oracle_spec, "oracle spec (mock:seed=..,sel=.. | recorded:<path> | remote | file:<json>)");
    cmd->add_option("--alpha", in.alpha, "relational cost weight");
    cmd->add_option("--sf-sel", in.sf_sel, "default semantic filter selectivity");
    cmd->add_option("--join-sel", in.join_sel, "join distinct-count selectivity");
    cmd->add_option("--seed", in.seed, "oracle seed override")->each([&](const std::string&) { in.seed_set = true; });
    cmd->add_option("--out", in.out_path, "output file (default stdout)");
    cmd->add_flag("--verbose", in.verbose, "verbose traces to stderr");
  };

  auto* parse_cmd = app.add_subcommand("parse", "parse SQL into canonical plan JSON");
  add_common(parse_cmd);

  auto* optimize_cmd = app.add_subcommand("optimize", "optimize a query or plan");
  add_common(optimize_cmd);
  optimize_cmd->add_option("--strategy", strategy_text, "none | pullup | costmodel");
  optimize_cmd->add_option("--stage", stage, "stop after a stage: simplify");

  auto* explain_cmd = app.add_subcommand("explain", "annotated plan with estimated rows and filter positions");
  add_common(explain_cmd);
  explain_cmd->add_option("--strategy", strategy_text, "none | pullup | costmodel");

  auto* run_cmd = app.add_subcommand("run", "execute a plan over a dataset");
  add_common(run_cmd);
  run_cmd->add_option("--format", out_format, "result format: csv");

  auto* compare_cmd = app.add_subcommand("compare", "run strategies end-to-end and compare");
  add_common(compare_cmd);
  compare_cmd->add_option("--strategies", strategies_text, "comma-separated strategy list");

  auto* bench_cmd = app.add_subcommand("bench", "run a shipped preset");
  bench_cmd->add_option("--preset", preset_path, "preset JSON file")->required();
  bench_cmd->add_option("--out", out_dir, "output directory");
  bench_cmd->add_flag("--verbose", in.verbose, "verbose traces to stderr");

  CLI11_PARSE(app, argc, argv);

  try {
    SelectivityModel model;
    OptimizerConfig config;
    resolve_model(in, model, config);

    if (parse_cmd->parsed()) {
      PlanTree tree = resolve_plan(in);
      emit(tree_to_json(tree), in.out_path);
      return 0;
    }

    if (optimize_cmd->parsed()) {
      PlanTree tree = resolve_plan(in);
      if (stage == "simplify") {
        RewriteTrace trace;
        PlanTree simplified = simplify_to_fixed_point(tree, &trace);
        json steps = json::array();
        for (const auto& step : trace.steps) steps.push_back(json{{"nodes", step.nodes}, {"rewrite", step.rewrite}});
        emit(json{{"plan", tree_to_json(simplified)}, {"rewrite_trace", steps}}, in.out_path);
        return 0;
      }
      auto strategy = strategy_from_name(strategy_text);
      if (!strategy) throw SemqlError(ErrorKind::Optimize, "unknown strategy '" + strategy_text + "'");
      ExactStats stats = resolve_stats(in);
      std::vector<std::string> dp_trace;
      auto outcome = optimize_query(tree, *strategy, model, config, stats, in.verbose ? &dp_trace : nullptr);
      if (outcome.fell_back_to_pullup) {
        std::cerr << "warning: filter count exceeds the DP cap; fell back to pull-up\n";
      }
      for (const auto& line : dp_trace) std::cerr << line << "\n";
      json j{{"plan", tree_to_json(outcome.plan)}, {"strategy", strategy_name(*strategy)}};
      json trace = json::array();
      for (const auto& step : outcome.rewrite_trace.steps) {
        trace.push_back(json{{"nodes", step.nodes}, {"rewrite", step.rewrite}});
      }
      j["rewrite_trace"] = trace;
      if (!outcome.swaps.empty()) {
        json swaps = json::array();
        for (const auto& s : outcome.swaps) swaps.push_back(json{{"crossed", s.crossed}, {"filter", s.filter}});
        j["swap_trace"] = swaps;
      }
      if (outcome.placement) {
        json assignments = json::object();
        for (const auto& [filter, node] : outcome.placement->assignments) {
          assignments[std::to_string(filter)] = node;
        }
        j["placement"] = assignments;
        j["estimated"] = json{{"llm_rows", outcome.estimated->llm_rows},
                              {"rel_rows", outcome.estimated->rel_rows},
                              {"total", outcome.estimated->total}};
      }
      j["timing"] = json{{"placement_ms", outcome.placement_ms}, {"simplify_ms", outcome.simplify_ms}};
      emit(j, in.out_path);
      return 0;
    }

    if (explain_cmd->parsed()) {
      PlanTree tree = resolve_plan(in);
      auto strategy = strategy_from_name(strategy_text);
      if (!strategy) throw SemqlError(ErrorKind::Optimize, "unknown strategy '" + strategy_text + "'");
      ExactStats stats = resolve_stats(in);
      auto outcome = optimize_query(tree, *strategy, model, config, stats);
      const PlanTree& plan = outcome.plan;
      std::function<void(NodeId, int)> print = [&](NodeId id, int depth) {
        const PlanNode& node = plan.node(id);
        double rows = relational_cost(plan, id, config, stats);
        std::cout << std::string(static_cast<size_t>(depth) * 2, ' ') << "#" << id << " " << node_kind_name(node.kind)
                  << " (est_rows=" << rows << ")";
        if (node.kind == NodeKind::SemFilter) {
          std::cout << " [" << std::get<SemFilterPayload>(node.payload).predicate.template_text << "]";
        }
        std::cout << "\n";
        for (NodeId child : node.children) print(child, depth + 1);
      };
      print(plan.root, 0);
      return 0;
    }

    if (run_cmd->parsed()) {
      Catalog catalog = resolve_catalog(in);
      PlanTree tree = resolve_plan(in);
      if (in.data_dir.empty()) throw SemqlError(ErrorKind::Execute, "--data is required");
      Dataset data = load_dataset(in.data_dir, catalog);
      auto oracle = make_oracle(in.oracle_spec);
      FunctionCache cache;
      auto result = execute(tree, data, *oracle, cache);
      if (out_format == "csv") {
        if (in.out_path.empty()) throw SemqlError(ErrorKind::Execute, "--format csv requires --out");
        write_csv(in.out_path, result.output);
        std::cout << dump_canonical(metrics_to_json(tree, result.metrics));
      } else {
        json rows = json::array();
        for (const auto& row : result.output.rows) {
          json r = json::array();
          for (const auto& v : row) r.push_back(is_null(v) ? json(nullptr) : json(canonical_text(v)));
          rows.push_back(r);
        }
        json columns = json::array();
        for (const auto& col : result.output.schema) {
          columns.push_back(col.table.empty() ? col.name : col.table + "." + col.name);
        }
        emit(json{{"columns", columns}, {"metrics", metrics_to_json(tree, result.metrics)}, {"rows", rows}},
             in.out_path);
      }
      return 0;
    }

    if (compare_cmd->parsed()) {
      Catalog catalog = resolve_catalog(in);
      if (in.sql_path.empty()) throw SemqlError(ErrorKind::Parse, "--sql is required");
      if (in.data_dir.empty()) throw SemqlError(ErrorKind::Execute, "--data is required");
      std::vector<Strategy> strategies;
      std::stringstream ss(strategies_text);
      std::string part;
      while (std::getline(ss, part, ',')) {
        auto strategy = strategy_from_name(part);
        if (!strategy) throw SemqlError(ErrorKind::Optimize, "unknown strategy '" + part + "'");
        strategies.push_back(*strategy);
      }
      Workload w;
      w.catalog = catalog;
      w.data = load_dataset(in.data_dir, catalog);
      w.alpha = in.alpha >= 0 ? in.alpha : config.alpha;
      if (in.oracle_spec.rfind("mock", 0) == 0) {
        auto probe = make_oracle(in.oracle_spec);  // validates the spec
        (void)probe;
      }
      if (in.seed_set) w.oracle_seed = in.seed;
      auto report = compare_strategies(w, read_file(in.sql_path), strategies);
      json rows = json::array();
      for (const auto& row : report.rows) {
        json r{{"equal_to_baseline", row.equal_to_baseline},
               {"f1_vs_baseline", row.f1_vs_baseline},
               {"llm_calls", row.llm_calls},
               {"rel_rows_processed", row.rel_rows_processed},
               {"strategy", row.strategy},
               {"timing", json{{"wall_ms", row.wall_ms}}}};
        if (row.estimated) {
          r["estimated"] = json{{"llm_rows", row.estimated->llm_rows},
                                {"rel_rows", row.estimated->rel_rows},
                                {"total", row.estimated->total}};
        }
        rows.push_back(r);
      }
      emit(json{{"strategies", rows}}, in.out_path);
      return 0;
    }

    if (bench_cmd->parsed()) {
      WorkloadSpec spec;
      if (std::filesystem::exists(preset_path)) {
        spec = load_workload_spec(preset_path);
      } else {
        // bare preset names map to the shipped generators
        static const std::map<std::string, uint64_t> default_seeds = {
            {"fig1", 42}, {"chain5", 7}, {"alpha-sweep", 42}, {"sel-grid", 11}, {"overhead", 3}, {"empty", 1}};
        auto it = default_seeds.find(preset_path);
        if (it == default_seeds.end()) {
          throw SemqlError(ErrorKind::Execute, "unknown preset '" + preset_path + "'");
        }
        spec.generator = preset_path;
        spec.seed = it->second;
      }
      Workload workload = generate_workload(spec);
      std::filesystem::create_directories(out_dir);
      write_workload(workload, out_dir + "/dataset");
      json summary{{"preset", workload.name}};

      if (workload.name == "alpha-sweep") {
        std::vector<double> grid;
        for (int e = -7; e <= 0; ++e) grid.push_back(std::pow(10.0, e));
        auto report = sweep_alpha(workload, workload.queries[0], grid);
        write_alpha_sweep_csv(report, out_dir + "/alpha_sweep.csv");
        summary["regimes"] = report.regimes.size();
      } else if (workload.name == "sel-grid") {
        auto report = sweep_selectivity(workload, workload.queries[0], {0.1, 0.2, 0.8}, {0.05, 0.1, 0.8});
        write_selectivity_csv(report, out_dir + "/selectivity_grid.csv");
        summary["distinct_plans"] = report.distinct_plans;
      } else if (workload.name == "overhead") {
        auto rows = measure_optimizer_overhead(workload);
        write_overhead_csv(rows, out_dir + "/overhead.csv");
        double worst = 0;
        for (const auto& row : rows) worst = std::max(worst, row.placement_ms);
        summary["max_placement_ms"] = worst;
      } else {
        auto report = run_bench(workload, {Strategy::None, Strategy::Pullup, Strategy::CostModel});
        write_bench_csv(report, out_dir + "/compare.csv");
        json rows = json::array();
        for (const auto& [name, metrics] : report.queries) {
          for (const auto& row : metrics) {
            rows.push_back(json{{"f1_vs_baseline", row.f1_vs_baseline},
                                {"llm_calls", row.llm_calls},
                                {"query", name},
                                {"rel_rows_processed", row.rel_rows_processed},
                                {"strategy", row.strategy},
                                {"timing", json{{"wall_ms", row.wall_ms}}}});
          }
        }
        summary["per_query"] = rows;
        json aggregates = json::object();
        for (const auto& name : report.strategies) {
          aggregates[name] = json{{"geo_call_reduction", report.geo_call_reduction.at(name)},
                                  {"geo_speedup", report.geo_speedup.at(name)},
                                  {"mean_f1", report.mean_f1.at(name)}};
        }
        summary["aggregates"] = aggregates;
      }
      std::ofstream out(out_dir + "/summary.json");
      out << dump_canonical(summary);
      return 0;
    }
  } catch (const SemqlError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
