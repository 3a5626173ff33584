#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "common/error.hpp"
#include "plan/plan_tree.hpp"
#include "sql/parser.hpp"
#include "rewrite/rewriter.hpp"
#include "sql/render_sql.hpp"
#include <fstream>
#include <sstream>

#include "bench/workload.hpp"
#include "plan/plan_json.hpp"
#include "test_support.hpp"

using namespace semql;

namespace {

Catalog book_catalog() {
  Catalog catalog;
  TableSchema books;
  books.columns = {{"book_id", ColumnType::Integer}, {"title", ColumnType::Text}, {"description", ColumnType::Text}};
  TableSchema reviews;
  reviews.columns = {{"review_id", ColumnType::Integer},
                     {"book_id", ColumnType::Integer},
                     {"text", ColumnType::Text},
                     {"rating", ColumnType::Integer}};
  catalog.tables["books"] = books;
  catalog.tables["reviews"] = reviews;
  return catalog;
}

const char* kListing1 =
    "SELECT b.title, r.text FROM books b JOIN reviews r ON b.book_id = r.book_id "
    "WHERE SEMANTIC('{b.description} is about AI?') AND SEMANTIC('{r.text} is a positive review?') "
    "AND r.rating >= 3;";

NodeId only_node_of(const PlanTree& tree, NodeKind kind) {
  NodeId found = 0;
  int count = 0;
  for (const auto& [id, node] : tree.nodes) {
    if (node.kind == kind) {
      found = id;
      count++;
    }
  }
  REQUIRE(count == 1);
  return found;
}

}  // namespace

TEST_CASE("listing 1 parses to the push-down shape") {
  PlanTree tree = parse(kListing1, book_catalog());
  REQUIRE(validate(tree).empty());

  // root Project(title, text) over the join
  const PlanNode& root = tree.node(tree.root);
  REQUIRE(root.kind == NodeKind::Project);
  const auto& cols = std::get<ProjectPayload>(root.payload).columns;
  REQUIRE(cols.size() == 2);
  CHECK(cols[0] == ColumnRef{"books", "title"});
  CHECK(cols[1] == ColumnRef{"reviews", "text"});

  NodeId join = only_node_of(tree, NodeKind::InnerJoin);
  CHECK(tree.node(root.children[0]).id == join);

  // books side: SF(phi1) directly above the scan
  const PlanNode& left = tree.node(tree.node(join).children[0]);
  REQUIRE(left.kind == NodeKind::SemFilter);
  CHECK(std::get<SemFilterPayload>(left.payload).predicate.template_text == "{books.description} is about AI?");
  CHECK(tree.node(left.children[0]).kind == NodeKind::TableScan);

  // reviews side: SF(phi2) above the relational filter above the scan
  const PlanNode& right = tree.node(tree.node(join).children[1]);
  REQUIRE(right.kind == NodeKind::SemFilter);
  CHECK(std::get<SemFilterPayload>(right.payload).predicate.template_text == "{reviews.text} is a positive review?");
  const PlanNode& sigma = tree.node(right.children[0]);
  REQUIRE(sigma.kind == NodeKind::RelFilter);
  CHECK(tree.node(sigma.children[0]).kind == NodeKind::TableScan);
}

TEST_CASE("select star becomes a projection over the scan") {
  PlanTree tree = parse("SELECT * FROM books", book_catalog());
  const PlanNode& root = tree.node(tree.root);
  REQUIRE(root.kind == NodeKind::Project);
  CHECK(std::get<ProjectPayload>(root.payload).columns.size() == 3);
  CHECK(tree.node(root.children[0]).kind == NodeKind::TableScan);
}

TEST_CASE("listing 2 parses with the score filter above the projection") {
  PlanTree tree = parse(
      "SELECT b.title, SEMANTIC_INT('Rate {r.text} sentiment 1-5') AS score "
      "FROM books b JOIN reviews r ON b.book_id = r.book_id WHERE score >= 4;",
      book_catalog());
  REQUIRE(validate(tree).empty());

  NodeId sp = only_node_of(tree, NodeKind::SemProject);
  NodeId sigma = only_node_of(tree, NodeKind::RelFilter);
  // the filter on score sits directly above the projection producing it
  CHECK(tree.node(sigma).children[0] == sp);
  CHECK(std::get<RelFilterPayload>(tree.node(sigma).payload).conjuncts[0].column == ColumnRef{"", "score"});
  // the projection itself sits at its lowest position, above the reviews scan
  CHECK(tree.node(tree.node(sp).children[0]).kind == NodeKind::TableScan);
  const auto& payload = std::get<SemProjectPayload>(tree.node(sp).payload);
  CHECK(payload.output_name == "score");
  CHECK(payload.predicate.output_type == ColumnType::Integer);
}

TEST_CASE("every WHERE conjunct maps to exactly one filter node") {
  for (const auto& c : semql::testing::corpus_cases()) {
    PlanTree tree = parse(c.sql, c.workload.catalog);
    size_t semantic_in_source = 0;
    size_t pos = 0;
    while ((pos = c.sql.find("SEMANTIC('", pos)) != std::string::npos) {
      semantic_in_source++;
      pos += 10;
    }
    size_t sem_filters = 0;
    for (const auto& [id, node] : tree.nodes) {
      if (node.kind == NodeKind::SemFilter) sem_filters++;
    }
    CHECK(sem_filters == semantic_in_source);
  }
}

TEST_CASE("errors carry positions and kinds") {
  Catalog catalog = book_catalog();
  CHECK_THROWS_WITH_AS(parse("SELECT FROM books", catalog), doctest::Contains("expected"), SemqlError);
  CHECK_THROWS_AS(parse("SELECT b.title FROM books b WHERE SEMANTIC('{b.nope} ok?')", catalog), SemqlError);
  try {
    parse("SELECT t.x FROM missing t", catalog);
    FAIL("expected bind error");
  } catch (const SemqlError& e) {
    CHECK(e.kind() == ErrorKind::Bind);
  }
  try {
    parse("SELECT b.title FROM books b WHERE b.rating >= 3 OR SEMANTIC('{b.description} ok?')", catalog);
    FAIL("expected parse error");
  } catch (const SemqlError& e) {
    CHECK(e.kind() == ErrorKind::Parse);
    CHECK(std::string(e.what()).find("OR") != std::string::npos);
  }
  // non-boolean SEMANTIC_* in WHERE
  CHECK_THROWS_AS(parse("SELECT b.title FROM books b WHERE SEMANTIC_INT('rate {b.title}')", catalog), SemqlError);
}

TEST_CASE("keywords are case-insensitive, identifiers case-sensitive") {
  PlanTree tree = parse("select b.title from books b where b.book_id >= 1", book_catalog());
  CHECK(validate(tree).empty());
  CHECK_THROWS_AS(parse("SELECT b.TITLE FROM books b", book_catalog()), SemqlError);
}

TEST_CASE("semantic condition in JOIN ON becomes a two-table filter above a keyless join") {
  Catalog catalog = book_catalog();
  PlanTree tree = parse(
      "SELECT b.title, r.text FROM books b JOIN reviews r ON SEMANTIC('{r.text} mentions {b.title}?')", catalog);
  NodeId join = only_node_of(tree, NodeKind::InnerJoin);
  CHECK(std::get<InnerJoinPayload>(tree.node(join).payload).keys.empty());
  NodeId sf = only_node_of(tree, NodeKind::SemFilter);
  CHECK(tree.node(sf).children[0] == join);
  CHECK(std::get<SemFilterPayload>(tree.node(sf).payload).predicate.referenced_columns.size() == 2);
}

namespace {

// rendering folds interior pruning projections (inlined CTE SELECT lists)
// away, so round-trip equivalence is up to those nodes
PlanTree strip_interior_projects(PlanTree tree) {
  bool changed = true;
  while (changed) {
    changed = false;
    NodeId output = output_projection(tree);
    for (const auto& [id, node] : tree.nodes) {
      if (node.kind == NodeKind::Project && id != output) {
        detach_unary(tree, id);
        tree.nodes.erase(id);
        changed = true;
        break;
      }
    }
  }
  return tree;
}

}  // namespace

TEST_CASE("render_sql round-trips the corpus") {
  for (const auto& c : semql::testing::corpus_cases()) {
    PlanTree first = parse(c.sql, c.workload.catalog);
    std::string rendered = render_sql(first);
    PlanTree second = parse(rendered, c.workload.catalog);
    CHECK_MESSAGE(isomorphic(strip_interior_projects(first), strip_interior_projects(second)), c.name, ": ", rendered);
    // parse . render . parse is idempotent
    CHECK(render_sql(second) == rendered);
  }
}

TEST_CASE("canonical plan json for the motivating query matches the golden file") {
  WorkloadSpec spec{"fig1", 42, {}};
  auto w = generate_workload(spec);
  PlanTree tree = parse(w.queries[0], w.catalog);
  std::string emitted = dump_canonical(tree_to_json(tree));
  std::ifstream in(std::string(SEMQL_TEST_DIR) + "/golden/fig1_plan.json");
  REQUIRE(in.good());
  std::stringstream golden;
  golden << in.rdbuf();
  CHECK(emitted == golden.str());
}

TEST_CASE("render_sql emits star for full projections") {
  PlanTree tree = parse("SELECT * FROM books", book_catalog());
  CHECK(render_sql(tree) == "SELECT * FROM books;");
}

TEST_CASE("render_sql expresses a decomposed semantic join as an explicit cross join") {
  for (const auto& c : semql::testing::corpus_cases()) {
    if (c.name != "sj-decomposition") continue;
    PlanTree parsed = parse(c.sql, c.workload.catalog);
    PlanTree simplified = simplify_to_fixed_point(parsed);
    std::string rendered = render_sql(simplified);
    CHECK(rendered.find("CROSS JOIN") != std::string::npos);
    CHECK(rendered.find("SEMANTIC(") != std::string::npos);
    PlanTree reparsed = parse(rendered, c.workload.catalog);
    CHECK(isomorphic(strip_interior_projects(simplified), strip_interior_projects(reparsed)));
  }
}

TEST_CASE("render_sql reports constructs without surface syntax") {
  PlanTree tree;
  tree.catalog = book_catalog();
  NodeId scan = tree.add_node(NodeKind::TableScan, TableScanPayload{"books"}, {});
  AggregatePayload agg;
  agg.group_by = {ColumnRef{"books", "title"}};
  agg.aggregates = {{AggregateOp::CountStar, std::nullopt, "n"}};
  NodeId agg_node = tree.add_node(NodeKind::Aggregate, agg, {scan});
  tree.root = tree.add_node(NodeKind::Project, ProjectPayload{{ColumnRef{"books", "title"}}}, {agg_node});
  CHECK_THROWS_AS(render_sql(tree), SemqlError);
}

TEST_CASE("cte bodies are inlined with filters pushed through") {
  Catalog catalog = book_catalog();
  PlanTree tree = parse(
      "WITH hot AS (SELECT r.review_id, r.book_id, r.text FROM reviews r WHERE r.rating >= 4) "
      "SELECT b.title, h.text FROM books b JOIN hot h ON b.book_id = h.book_id "
      "WHERE SEMANTIC('{h.text} is glowing?');",
      catalog);
  REQUIRE(validate(tree).empty());
  // the CTE's relational filter survives inline, below the join
  NodeId sigma = only_node_of(tree, NodeKind::RelFilter);
  CHECK(std::get<RelFilterPayload>(tree.node(sigma).payload).conjuncts[0].column == ColumnRef{"reviews", "rating"});
  // the outer semantic filter binds through the CTE alias to the base table
  NodeId sf = only_node_of(tree, NodeKind::SemFilter);
  CHECK(std::get<SemFilterPayload>(tree.node(sf).payload).predicate.template_text == "{reviews.text} is glowing?");
}

TEST_CASE("duplicate use of one base table is rejected") {
  Catalog catalog = book_catalog();
  CHECK_THROWS_AS(
      parse("SELECT a.title FROM books a JOIN books c ON a.book_id = c.book_id", catalog), SemqlError);
}

TEST_CASE("column-vs-column comparisons parse and bind") {
  Catalog catalog = book_catalog();
  PlanTree tree = parse(
      "SELECT b.title FROM books b JOIN reviews r ON b.book_id = r.book_id WHERE b.book_id >= r.rating", catalog);
  NodeId sigma = only_node_of(tree, NodeKind::RelFilter);
  const auto& cmp = std::get<RelFilterPayload>(tree.node(sigma).payload).conjuncts[0];
  REQUIRE(cmp.rhs_column.has_value());
  CHECK(*cmp.rhs_column == ColumnRef{"reviews", "rating"});
  // spans both tables, so it sits directly above the join
  CHECK(tree.node(tree.node(sigma).children[0]).kind == NodeKind::InnerJoin);
}
