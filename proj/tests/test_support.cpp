#include "test_support.hpp"

#include <cstdio>

#include "exec/function_cache.hpp"

namespace semql::testing {

namespace {

std::string padded(const char* prefix, int i) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%03d", prefix, i);
  return buf;
}

}  // namespace

RandomInstance make_random_instance(uint64_t seed, bool with_blocks) {
  std::mt19937_64 rng(seed);
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<uint64_t>(n)); };

  RandomInstance inst;
  inst.config.alpha = std::vector<double>{0.0625, 0.015625, 0.0009765625}[pick(3)];
  inst.config.rel_filter_selectivity = 0.5;
  inst.model.default_sf_selectivity = 0.25;
  inst.model.join_distinct_selectivity = std::vector<double>{0.5, 0.25, 0.125}[pick(3)];

  int table_count = 1 + pick(3);
  std::vector<std::string> tables;
  std::vector<int> rows;
  for (int t = 0; t < table_count; ++t) {
    std::string name(1, static_cast<char>('a' + t));
    name = "t" + name;
    tables.push_back(name);
    int n = 4 + pick(22);
    rows.push_back(n);
    TableSchema schema;
    schema.columns = {{"k", ColumnType::Integer},
                      {"f", ColumnType::Integer},
                      {"v", ColumnType::Integer},
                      {"s", ColumnType::Text}};
    schema.row_count = static_cast<uint64_t>(n);
    inst.catalog.tables[name] = schema;

    Relation rel;
    for (const auto& [col, type] : schema.columns) rel.schema.push_back({name, col, type});
    int text_domain = 1 + pick(n);
    int prev_rows = t == 0 ? n : rows[t - 1];
    for (int i = 1; i <= n; ++i) {
      Value v = pick(10) == 0 ? Value{std::monostate{}} : Value{int64_t{pick(5)}};
      Value s = pick(12) == 0 ? Value{std::monostate{}} : Value{"w" + std::to_string(pick(text_domain))};
      rel.rows.push_back({int64_t{i}, int64_t{1 + pick(prev_rows)}, v, s});
    }
    inst.data[name] = std::move(rel);
  }

  PlanTree& tree = inst.tree;
  tree.catalog = inst.catalog;
  std::vector<NodeId> scan(tables.size());
  std::vector<NodeId> table_top(tables.size());  // current insertion point above each scan
  for (size_t t = 0; t < tables.size(); ++t) {
    scan[t] = tree.add_node(NodeKind::TableScan, TableScanPayload{tables[t]}, {});
    table_top[t] = scan[t];
  }

  // relational filters directly above their scans
  int rel_filter_count = pick(3);
  for (int i = 0; i < rel_filter_count; ++i) {
    size_t t = static_cast<size_t>(pick(table_count));
    Comparison cmp;
    cmp.column = ColumnRef{tables[t], "v"};
    cmp.op = std::vector<CompareOp>{CompareOp::GreaterEqual, CompareOp::LessEqual, CompareOp::NotEqual}[pick(3)];
    cmp.operands = {int64_t{pick(5)}};
    NodeId filter = tree.add_node(NodeKind::RelFilter, RelFilterPayload{{cmp}}, {table_top[t]});
    table_top[t] = filter;
  }

  // single-table semantic filters above the per-table stacks
  int sf_count = 1 + pick(3);
  for (int i = 0; i < sf_count; ++i) {
    size_t t = static_cast<size_t>(pick(table_count));
    SemanticPredicate pred;
    pred.template_text = "is {" + tables[t] + ".s} kind " + std::to_string(i) + "?";
    pred.referenced_columns = {ColumnRef{tables[t], "s"}};
    pred.output_type = ColumnType::Boolean;
    SemFilterPayload payload{pred, std::vector<double>{0.5, 0.25, 0.125}[pick(3)]};
    NodeId filter = tree.add_node(NodeKind::SemFilter, std::move(payload), {table_top[t]});
    table_top[t] = filter;
    inst.semantic_filters.push_back(filter);
  }

  // left-deep join chain
  NodeId root = table_top[0];
  for (size_t t = 1; t < tables.size(); ++t) {
    if (pick(5) == 0) {
      root = tree.add_node(NodeKind::CrossJoin, CrossJoinPayload{}, {root, table_top[t]});
    } else {
      InnerJoinPayload payload;
      payload.keys = {{ColumnRef{tables[t - 1], "k"}, ColumnRef{tables[t], "f"}}};
      root = tree.add_node(NodeKind::InnerJoin, std::move(payload), {root, table_top[t]});
    }
    if (with_blocks && pick(6) == 0) {
      root = tree.add_node(NodeKind::Limit, LimitPayload{static_cast<uint64_t>(4 + pick(40))}, {root});
    }
  }

  // occasionally a two-table filter above the top join
  if (table_count >= 2 && pick(4) == 0) {
    SemanticPredicate pred;
    pred.template_text = "{" + tables[0] + ".s} pairs {" + tables[1] + ".s}?";
    pred.referenced_columns = {ColumnRef{tables[0], "s"}, ColumnRef{tables[1], "s"}};
    pred.output_type = ColumnType::Boolean;
    SemFilterPayload payload{pred, 0.5};
    NodeId filter = tree.add_node(NodeKind::SemFilter, std::move(payload), {root});
    root = filter;
    inst.semantic_filters.push_back(filter);
  }
  tree.root = root;
  return inst;
}

ExecutionMetrics run_metrics(const PlanTree& tree, const Dataset& data, SemanticOracle& oracle) {
  FunctionCache cache;
  return execute(tree, data, oracle, cache).metrics;
}

namespace {

Workload small_book_workload() {
  Workload w;
  w.name = "small-books";
  w.oracle_seed = 5;
  w.oracle_default_selectivity = 0.5;

  TableSchema books;
  books.columns = {{"book_id", ColumnType::Integer}, {"title", ColumnType::Text}, {"description", ColumnType::Text}};
  books.row_count = 20;
  TableSchema reviews;
  reviews.columns = {{"review_id", ColumnType::Integer},
                     {"book_id", ColumnType::Integer},
                     {"text", ColumnType::Text},
                     {"rating", ColumnType::Integer}};
  reviews.row_count = 60;
  w.catalog.tables["books"] = books;
  w.catalog.tables["reviews"] = reviews;

  Relation books_rel;
  for (const auto& [name, type] : books.columns) books_rel.schema.push_back({"books", name, type});
  for (int i = 1; i <= 20; ++i) {
    books_rel.rows.push_back({int64_t{i}, padded("b-", i), padded("about-", i)});
  }
  Relation reviews_rel;
  for (const auto& [name, type] : reviews.columns) reviews_rel.schema.push_back({"reviews", name, type});
  for (int i = 1; i <= 60; ++i) {
    int64_t book_id = ((i - 1) % 25) + 1;  // some dangle past book 20
    reviews_rel.rows.push_back({int64_t{i}, book_id, padded("rv-", i), int64_t{1 + (i % 5)}});
  }
  w.data["books"] = std::move(books_rel);
  w.data["reviews"] = std::move(reviews_rel);
  return w;
}

Workload movie_workload() {
  Workload w;
  w.name = "movies";
  w.oracle_seed = 9;
  w.oracle_default_selectivity = 0.3;

  TableSchema movies;
  movies.columns = {{"movie_id", ColumnType::Integer}, {"title", ColumnType::Text}, {"year", ColumnType::Integer}};
  movies.row_count = 12;
  TableSchema mentions;
  mentions.columns = {{"mention_id", ColumnType::Integer}, {"text", ColumnType::Text}, {"year", ColumnType::Integer}};
  mentions.row_count = 15;
  w.catalog.tables["movies"] = movies;
  w.catalog.tables["mentions"] = mentions;

  Relation movies_rel;
  for (const auto& [name, type] : movies.columns) movies_rel.schema.push_back({"movies", name, type});
  for (int i = 1; i <= 12; ++i) {
    movies_rel.rows.push_back({int64_t{i}, padded("film-", i), int64_t{1990 + (i % 20)}});
  }
  Relation mentions_rel;
  for (const auto& [name, type] : mentions.columns) mentions_rel.schema.push_back({"mentions", name, type});
  for (int i = 1; i <= 15; ++i) {
    mentions_rel.rows.push_back({int64_t{i}, padded("post-", i), int64_t{1995 + (i % 12)}});
  }
  w.data["movies"] = std::move(movies_rel);
  w.data["mentions"] = std::move(mentions_rel);
  return w;
}

Workload tagged_workload() {
  Workload w;
  w.name = "tagged";
  w.oracle_seed = 13;
  w.oracle_default_selectivity = 0.4;

  TableSchema posts;
  posts.columns = {{"post_id", ColumnType::Integer},
                   {"author_id", ColumnType::Integer},
                   {"body", ColumnType::Text},
                   {"score", ColumnType::Integer}};
  posts.row_count = 40;
  TableSchema authors;
  authors.columns = {{"author_id", ColumnType::Integer}, {"name", ColumnType::Text}};
  authors.row_count = 8;
  TableSchema topics;
  topics.columns = {{"topic_id", ColumnType::Integer}, {"label", ColumnType::Text}};
  topics.row_count = 3;
  w.catalog.tables["posts"] = posts;
  w.catalog.tables["authors"] = authors;
  w.catalog.tables["topics"] = topics;

  Relation posts_rel;
  for (const auto& [name, type] : posts.columns) posts_rel.schema.push_back({"posts", name, type});
  for (int i = 1; i <= 40; ++i) {
    posts_rel.rows.push_back({int64_t{i}, int64_t{((i - 1) % 8) + 1}, padded("post-", i), int64_t{i % 10}});
  }
  Relation authors_rel;
  for (const auto& [name, type] : authors.columns) authors_rel.schema.push_back({"authors", name, type});
  for (int i = 1; i <= 8; ++i) authors_rel.rows.push_back({int64_t{i}, padded("author-", i)});
  Relation topics_rel;
  for (const auto& [name, type] : topics.columns) topics_rel.schema.push_back({"topics", name, type});
  for (int i = 1; i <= 3; ++i) topics_rel.rows.push_back({int64_t{i}, padded("topic-", i)});
  w.data["posts"] = std::move(posts_rel);
  w.data["authors"] = std::move(authors_rel);
  w.data["topics"] = std::move(topics_rel);
  return w;
}

}  // namespace

std::vector<CorpusCase> corpus_cases() {
  std::vector<CorpusCase> cases;

  {
    WorkloadSpec spec{"fig1", 42, {}};
    CorpusCase c;
    c.workload = generate_workload(spec);
    c.name = "fig1";
    c.sql = c.workload.queries[0];
    cases.push_back(std::move(c));
  }
  {
    CorpusCase c;
    c.name = "listing2-score";
    c.workload = small_book_workload();
    c.sql =
        "SELECT b.title, SEMANTIC_INT('Rate {r.text} sentiment 1-5') AS score "
        "FROM books b JOIN reviews r ON b.book_id = r.book_id "
        "WHERE score >= 4;";
    cases.push_back(std::move(c));
  }
  {
    WorkloadSpec spec{"chain5", 7, {}};
    CorpusCase c;
    c.workload = generate_workload(spec);
    c.name = "chain5";
    c.sql = c.workload.queries[0];
    cases.push_back(std::move(c));
  }
  {
    CorpusCase c;
    c.name = "sj-decomposition";
    c.workload = movie_workload();
    c.sql =
        "SELECT m.title, x.text "
        "FROM movies m JOIN mentions x ON SEMANTIC('does {x.text} mention {m.title}?') "
        "WHERE m.year >= x.year;";
    cases.push_back(std::move(c));
  }
  {
    CorpusCase c;
    c.name = "cte-cross";
    c.workload = tagged_workload();
    c.sql =
        "WITH good_posts AS ("
        "  SELECT p.post_id, p.author_id, p.body FROM posts p "
        "  WHERE p.score >= 3 AND SEMANTIC('{p.body} is substantive?')"
        ") "
        "SELECT g.body, a.name, t.label "
        "FROM good_posts g "
        "JOIN authors a ON g.author_id = a.author_id "
        "CROSS JOIN topics t "
        "WHERE SEMANTIC('{a.name} writes about {t.label}?');";
    cases.push_back(std::move(c));
  }
  {
    CorpusCase c;
    c.name = "orderby-limit";
    c.workload = small_book_workload();
    c.sql =
        "SELECT b.title, r.rating FROM books b JOIN reviews r ON b.book_id = r.book_id "
        "WHERE SEMANTIC('{r.text} is a positive review?') AND r.rating >= 2 "
        "ORDER BY r.rating DESC, b.title LIMIT 7;";
    cases.push_back(std::move(c));
  }
  {
    WorkloadSpec spec{"sel-grid", 11, {}};
    CorpusCase c;
    c.workload = generate_workload(spec);
    c.name = "sel-grid";
    c.sql = c.workload.queries[0];
    cases.push_back(std::move(c));
  }
  {
    CorpusCase c;
    c.name = "semantic-string";
    c.workload = tagged_workload();
    c.sql =
        "SELECT p.body, SEMANTIC_STRING('one-word tag for {p.body}') AS tag "
        "FROM posts p JOIN authors a ON p.author_id = a.author_id "
        "WHERE p.score >= 5 AND SEMANTIC('{p.body} is substantive?');";
    cases.push_back(std::move(c));
  }
  return cases;
}

}  // namespace semql::testing
