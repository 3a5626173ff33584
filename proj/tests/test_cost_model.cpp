#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cost/cost_model.hpp"
#include "common/error.hpp"
#include "exec/collect_stats.hpp"
#include "exec/executor.hpp"
#include "exec/function_cache.hpp"
#include "exec/oracle.hpp"
#include "sql/parser.hpp"
#include "test_support.hpp"

using namespace semql;

namespace {

SemanticFilterDescriptor make_filter(NodeId id, std::set<std::string> tables, double selectivity) {
  SemanticFilterDescriptor out;
  out.filter_node = id;
  out.referenced_tables = std::move(tables);
  out.selectivity = selectivity;
  return out;
}

Catalog chain_catalog() {
  Catalog catalog;
  for (const char* name : {"ta", "tb", "tc"}) {
    TableSchema t;
    t.columns = {{"k", ColumnType::Integer}, {"f", ColumnType::Integer}, {"s", ColumnType::Text}};
    t.row_count = 1000;
    catalog.tables[name] = t;
  }
  return catalog;
}

}  // namespace

TEST_CASE("combined selectivity") {
  std::vector<SemanticFilterDescriptor> filters{make_filter(1, {"ta"}, 0.2), make_filter(2, {"ta", "tb"}, 0.2),
                                                make_filter(3, {"tc"}, 0.5)};
  // empty set: empty product
  CHECK(combined_selectivity({"ta"}, {}, filters) == 1.0);
  // both filters touch the table set: 0.2 * 0.2
  CHECK(combined_selectivity({"ta"}, {0, 1}, filters) == doctest::Approx(0.04).epsilon(1e-12));
  // disjoint reference excludes the factor
  CHECK(combined_selectivity({"ta"}, {2}, filters) == 1.0);
  // multiplicative over disjoint selections
  double lhs = combined_selectivity({"ta", "tc"}, {0, 2}, filters);
  double rhs = combined_selectivity({"ta", "tc"}, {0}, filters) * combined_selectivity({"ta", "tc"}, {2}, filters);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
}

TEST_CASE("relational cost formulas") {
  Catalog catalog = chain_catalog();
  OptimizerConfig config;
  ExactStats stats;

  PlanTree tree;
  tree.catalog = catalog;
  NodeId scan = tree.add_node(NodeKind::TableScan, TableScanPayload{"ta"}, {});
  tree.root = scan;
  CHECK(relational_cost(tree, scan, config, stats) == 1000.0);

  // rel-filter with exact stats injected keeps the measured cardinality
  Comparison cmp;
  cmp.column = ColumnRef{"ta", "k"};
  cmp.op = CompareOp::GreaterEqual;
  cmp.operands = {int64_t{0}};
  NodeId sigma = tree.add_node(NodeKind::RelFilter, RelFilterPayload{{cmp}}, {scan});
  tree.root = sigma;
  stats.node_rows[sigma] = 3000;
  CHECK(relational_cost(tree, sigma, config, stats) == 3000.0);
  stats.node_rows.clear();
  CHECK(relational_cost(tree, sigma, config, stats) == doctest::Approx(300.0));

  // cross join multiplies inputs
  PlanTree cross;
  cross.catalog = catalog;
  ExactStats cross_stats;
  cross_stats.table_rows["ta"] = 100;
  cross_stats.table_rows["tb"] = 200;
  NodeId a = cross.add_node(NodeKind::TableScan, TableScanPayload{"ta"}, {});
  NodeId b = cross.add_node(NodeKind::TableScan, TableScanPayload{"tb"}, {});
  cross.root = cross.add_node(NodeKind::CrossJoin, CrossJoinPayload{}, {a, b});
  CHECK(relational_cost(cross, cross.root, config, cross_stats) == 20000.0);
}

TEST_CASE("distinct count follows the path model") {
  Catalog catalog = chain_catalog();
  SelectivityModel model;  // s_i = 0.2, s_join = 0.1
  OptimizerConfig config;
  ExactStats stats;

  // ta -> join(tb) -> join(tc), filter on ta
  PlanTree tree;
  tree.catalog = catalog;
  NodeId sa = tree.add_node(NodeKind::TableScan, TableScanPayload{"ta"}, {});
  NodeId sb = tree.add_node(NodeKind::TableScan, TableScanPayload{"tb"}, {});
  InnerJoinPayload j1;
  j1.keys = {{ColumnRef{"ta", "k"}, ColumnRef{"tb", "f"}}};
  NodeId join1 = tree.add_node(NodeKind::InnerJoin, j1, {sa, sb});
  NodeId sc = tree.add_node(NodeKind::TableScan, TableScanPayload{"tc"}, {});
  InnerJoinPayload j2;
  j2.keys = {{ColumnRef{"tb", "k"}, ColumnRef{"tc", "f"}}};
  NodeId join2 = tree.add_node(NodeKind::InnerJoin, j2, {join1, sc});
  tree.root = join2;

  auto filter = make_filter(99, {"ta"}, 0.2);
  filter.predicate.referenced_columns = {ColumnRef{"ta", "s"}};

  // base at its own scan
  CHECK(distinct_count(tree, sa, filter, model, stats) == 1000.0);
  // one inner join on the path: 1000 * 0.1
  CHECK(distinct_count(tree, join1, filter, model, stats) == doctest::Approx(100.0));

  // two inner joins and one semantic filter on the path: 1000*0.1*0.1*0.2 = 2
  // (hand walk: scan 1000, first join x0.1, SF x0.2, second join x0.1)
  SemanticPredicate other;
  other.template_text = "{tb.s} ok?";
  other.referenced_columns = {ColumnRef{"tb", "s"}};
  NodeId sf = tree.add_node(NodeKind::SemFilter, SemFilterPayload{other, std::nullopt}, {});
  insert_above(tree, sf, join1);
  CHECK(distinct_count(tree, join2, filter, model, stats) == doctest::Approx(2.0));

  // exact stats override the walk
  stats.node_distinct[join2]["ta"] = 137;
  CHECK(distinct_count(tree, join2, filter, model, stats) == 137.0);

  // node not above the filter's tables
  CHECK_THROWS_AS(distinct_count(tree, sb, filter, model, stats), SemqlError);
}

TEST_CASE("distinct count is non-increasing along upward join paths") {
  for (uint64_t seed = 0; seed < 30; ++seed) {
    auto inst = semql::testing::make_random_instance(seed);
    SelectivityModel model;
    ExactStats stats;
    auto filters = collect_semantic_filters(inst.tree, model);
    auto parents = inst.tree.parent_map();
    for (const auto& filter : filters) {
      NodeId cur = filter.original_position;
      double prev = distinct_count(inst.tree, cur, filter, model, stats);
      while (parents.count(cur)) {
        cur = parents.at(cur);
        if (is_block_operator(inst.tree.node(cur).kind)) break;
        double next = distinct_count(inst.tree, cur, filter, model, stats);
        CHECK(next <= prev + 1e-12);
        prev = next;
      }
    }
  }
}

TEST_CASE("multi-table distinct counts multiply per-table discounts") {
  Catalog catalog = chain_catalog();
  SelectivityModel model;
  ExactStats stats;
  stats.table_rows["ta"] = 100;
  stats.table_rows["tb"] = 200;

  PlanTree tree;
  tree.catalog = catalog;
  NodeId a = tree.add_node(NodeKind::TableScan, TableScanPayload{"ta"}, {});
  NodeId b = tree.add_node(NodeKind::TableScan, TableScanPayload{"tb"}, {});
  tree.root = tree.add_node(NodeKind::CrossJoin, CrossJoinPayload{true}, {a, b});

  auto filter = make_filter(7, {"ta", "tb"}, 0.2);
  // cross join contributes factor 1 per side: 100 * 200 pairs
  CHECK(distinct_count(tree, tree.root, filter, model, stats) == 20000.0);
}

TEST_CASE("cache probe cost charges join output rows per ancestor filter") {
  Catalog catalog = chain_catalog();
  OptimizerConfig config;
  ExactStats stats;

  PlanTree tree;
  tree.catalog = catalog;
  NodeId a = tree.add_node(NodeKind::TableScan, TableScanPayload{"ta"}, {});
  NodeId b = tree.add_node(NodeKind::TableScan, TableScanPayload{"tb"}, {});
  InnerJoinPayload jp;
  jp.keys = {{ColumnRef{"ta", "k"}, ColumnRef{"tb", "f"}}};
  NodeId join = tree.add_node(NodeKind::InnerJoin, jp, {a, b});
  tree.root = join;
  stats.node_rows[join] = 5000;

  // no ancestor filters: no probes
  CHECK(cache_probe_cost(tree, join, config, stats) == 0.0);

  SemanticPredicate p1;
  p1.template_text = "{ta.s} x?";
  p1.referenced_columns = {ColumnRef{"ta", "s"}};
  NodeId sf1 = tree.add_node(NodeKind::SemFilter, SemFilterPayload{p1, std::nullopt}, {});
  insert_above(tree, sf1, join);
  CHECK(cache_probe_cost(tree, join, config, stats) == 5000.0);

  SemanticPredicate p2;
  p2.template_text = "{tb.s} y?";
  p2.referenced_columns = {ColumnRef{"tb", "s"}};
  NodeId sf2 = tree.add_node(NodeKind::SemFilter, SemFilterPayload{p2, std::nullopt}, {});
  insert_above(tree, sf2, sf1);
  CHECK(cache_probe_cost(tree, join, config, stats) == 10000.0);
}

// the estimated probe count at a join equals the executor's measured probes
// for a single filter placed directly above it
TEST_CASE("probe estimate matches executed probes on a constructed dataset") {
  Catalog catalog;
  TableSchema ta, tb;
  ta.columns = {{"k", ColumnType::Integer}, {"s", ColumnType::Text}};
  tb.columns = {{"f", ColumnType::Integer}, {"s", ColumnType::Text}};
  catalog.tables["ta"] = ta;
  catalog.tables["tb"] = tb;

  Relation ra;
  ra.schema = {{"ta", "k", ColumnType::Integer}, {"ta", "s", ColumnType::Text}};
  for (int i = 1; i <= 30; ++i) ra.rows.push_back({int64_t{i}, "a" + std::to_string(i)});
  Relation rb;
  rb.schema = {{"tb", "f", ColumnType::Integer}, {"tb", "s", ColumnType::Text}};
  for (int i = 1; i <= 100; ++i) rb.rows.push_back({int64_t{(i % 30) + 1}, "b" + std::to_string(i)});
  Dataset data{{"ta", ra}, {"tb", rb}};

  PlanTree tree;
  tree.catalog = catalog;
  NodeId a = tree.add_node(NodeKind::TableScan, TableScanPayload{"ta"}, {});
  NodeId b = tree.add_node(NodeKind::TableScan, TableScanPayload{"tb"}, {});
  InnerJoinPayload jp;
  jp.keys = {{ColumnRef{"ta", "k"}, ColumnRef{"tb", "f"}}};
  NodeId join = tree.add_node(NodeKind::InnerJoin, jp, {a, b});
  SemanticPredicate pred;
  pred.template_text = "{ta.s} keeps?";
  pred.referenced_columns = {ColumnRef{"ta", "s"}};
  NodeId sf = tree.add_node(NodeKind::SemFilter, SemFilterPayload{pred, std::nullopt}, {join});
  tree.root = sf;

  MockOracle oracle(1, 0.5);
  FunctionCache cache;
  auto result = execute(tree, data, oracle, cache);
  uint64_t join_rows = result.metrics.rows_per_node.at(join);

  OptimizerConfig config;
  ExactStats stats;
  stats.node_rows[join] = static_cast<double>(join_rows);
  CHECK(cache_probe_cost(tree, join, config, stats) == static_cast<double>(result.metrics.cache_probes));
}

TEST_CASE("cost estimate total is linear in alpha") {
  CostEstimate e1 = CostEstimate::make(100, 5000, 0.5);
  CHECK(e1.total == 100 + 0.5 * 5000);
  CostEstimate e2 = CostEstimate::make(100, 5000, 1.0);
  CHECK(e2.total - e1.total == doctest::Approx(0.5 * 5000));
}

TEST_CASE("exact stats collection matches direct execution counts") {
  WorkloadSpec spec{"fig1", 42, {}};
  auto w = generate_workload(spec);
  PlanTree parsed = parse(w.queries[0], w.catalog);
  auto oracle = w.make_mock_oracle();
  ExactStats stats = collect_exact_stats(parsed, w.data, *oracle);

  CHECK(stats.table_rows.at("books") == 1000.0);
  CHECK(stats.table_rows.at("reviews") == 5000.0);
  NodeId join = 0, sigma = 0;
  for (const auto& [id, node] : parsed.nodes) {
    if (node.kind == NodeKind::InnerJoin) join = id;
    if (node.kind == NodeKind::RelFilter) sigma = id;
  }
  CHECK(stats.node_rows.at(sigma) == 3000.0);
  CHECK(stats.node_rows.at(join) == 2500.0);
  CHECK(stats.node_distinct.at(join).at("books") == 800.0);
  CHECK(stats.node_distinct.at(join).at("reviews") == 2500.0);
}
