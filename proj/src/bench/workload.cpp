#include "bench/workload.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "common/error.hpp"
#include "exec/csv_io.hpp"
#include "plan/plan_json.hpp"

namespace semql {

namespace {

std::string padded(const char* prefix, int i) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%05d", prefix, i);
  return buf;
}

Workload build_fig1() {
  Workload w;
  w.name = "fig1";
  w.alpha = 1e-7;
  w.oracle_seed = 42;
  // the motivating call counts treat each stacked filter as seeing the full
  // join output, so both predicates pass everything
  w.oracle_default_selectivity = 1.0;
  w.oracle_per_template["{books.description} is about AI?"] = 1.0;
  w.oracle_per_template["{reviews.text} is a positive review?"] = 1.0;

  TableSchema books;
  books.columns = {{"book_id", ColumnType::Integer}, {"title", ColumnType::Text}, {"description", ColumnType::Text}};
  books.row_count = 1000;
  TableSchema reviews;
  reviews.columns = {{"review_id", ColumnType::Integer},
                     {"book_id", ColumnType::Integer},
                     {"text", ColumnType::Text},
                     {"rating", ColumnType::Integer}};
  reviews.row_count = 5000;
  w.catalog.tables["books"] = books;
  w.catalog.tables["reviews"] = reviews;

  Relation books_rel;
  for (const auto& [name, type] : books.columns) books_rel.schema.push_back({"books", name, type});
  for (int i = 1; i <= 1000; ++i) {
    books_rel.rows.push_back({int64_t{i}, padded("title-", i), padded("desc-", i)});
  }
  Relation reviews_rel;
  for (const auto& [name, type] : reviews.columns) reviews_rel.schema.push_back({"reviews", name, type});
  for (int i = 1; i <= 5000; ++i) {
    int64_t rating, book_id;
    if (i <= 2500) {
      rating = 3 + (i % 3);                 // passes the relational filter
      book_id = ((i - 1) % 800) + 1;        // join output covers exactly 800 books
    } else if (i <= 3000) {
      rating = 3 + (i % 3);
      book_id = 100000 + i;                 // dangling: filtered by the join
    } else {
      rating = 1 + (i % 2);                 // fails rating >= 3
      book_id = ((i - 1) % 1000) + 1;
    }
    reviews_rel.rows.push_back({int64_t{i}, book_id, padded("review-", i), rating});
  }
  w.data["books"] = std::move(books_rel);
  w.data["reviews"] = std::move(reviews_rel);

  w.queries.push_back(
      "SELECT b.title, r.text "
      "FROM books b JOIN reviews r ON b.book_id = r.book_id "
      "WHERE SEMANTIC('{b.description} is about AI?') "
      "AND SEMANTIC('{r.text} is a positive review?') "
      "AND r.rating >= 3;");
  return w;
}

Workload build_chain5() {
  Workload w;
  w.name = "chain5";
  w.alpha = 1e-7;
  w.oracle_seed = 7;
  w.oracle_default_selectivity = 0.1;

  std::string where;
  std::string from;
  std::string select = "SELECT ";
  for (int k = 1; k <= 5; ++k) {
    std::string table = "t" + std::to_string(k);
    TableSchema schema;
    schema.columns = {{"id", ColumnType::Integer},
                      {"a", ColumnType::Integer},
                      {"b", ColumnType::Integer},
                      {"p", ColumnType::Text}};
    schema.row_count = 1000;
    w.catalog.tables[table] = schema;

    Relation rel;
    for (const auto& [name, type] : schema.columns) rel.schema.push_back({table, name, type});
    for (int i = 1; i <= 1000; ++i) {
      int64_t link = ((i - 1) % 334) + 1;  // multiplicity ~3 per key: joins expand
      rel.rows.push_back({int64_t{i}, link, link, padded((table + "-p-").c_str(), i)});
    }
    w.data[table] = std::move(rel);

    select += (k > 1 ? ", " : "") + table + ".p";
    if (k == 1) {
      from = "FROM t1";
    } else {
      from += " JOIN " + table + " ON t" + std::to_string(k - 1) + ".b = " + table + ".a";
    }
    where += std::string(k > 1 ? " AND " : "") + "SEMANTIC('{" + table + ".p} looks interesting?')";
  }
  w.queries.push_back(select + " " + from + " WHERE " + where + ";");
  return w;
}

Workload build_sel_grid() {
  Workload w;
  w.name = "sel-grid";
  w.alpha = 0.2;  // statistics-free estimates need a visible relational term
  w.inject_exact_stats = false;
  w.oracle_seed = 11;
  w.oracle_default_selectivity = 0.5;

  TableSchema items;
  items.columns = {{"id", ColumnType::Integer}, {"payload", ColumnType::Text}};
  items.row_count = 1000;
  TableSchema notes;
  notes.columns = {{"note_id", ColumnType::Integer}, {"item_id", ColumnType::Integer}, {"body", ColumnType::Text}};
  notes.row_count = 1600;
  w.catalog.tables["items"] = items;
  w.catalog.tables["notes"] = notes;

  Relation items_rel;
  for (const auto& [name, type] : items.columns) items_rel.schema.push_back({"items", name, type});
  for (int i = 1; i <= 1000; ++i) items_rel.rows.push_back({int64_t{i}, padded("item-", i)});
  Relation notes_rel;
  for (const auto& [name, type] : notes.columns) notes_rel.schema.push_back({"notes", name, type});
  for (int i = 1; i <= 1600; ++i) {
    notes_rel.rows.push_back({int64_t{i}, int64_t{((i - 1) % 800) + 1}, padded("note-", i)});
  }
  w.data["items"] = std::move(items_rel);
  w.data["notes"] = std::move(notes_rel);

  w.queries.push_back(
      "SELECT items.payload, notes.body "
      "FROM items JOIN notes ON items.id = notes.item_id "
      "WHERE SEMANTIC('{items.payload} is relevant?');");
  return w;
}

Workload build_overhead() {
  Workload w;
  w.name = "overhead";
  w.alpha = 1e-7;
  w.oracle_seed = 3;
  w.oracle_default_selectivity = 0.5;
  w.oracle_latency_ms = 0;  // the acceptance run injects latency explicitly

  for (int k = 1; k <= 8; ++k) {
    std::string table = "u" + std::to_string(k);
    TableSchema schema;
    schema.columns = {{"id", ColumnType::Integer},
                      {"a", ColumnType::Integer},
                      {"b", ColumnType::Integer},
                      {"p", ColumnType::Text}};
    schema.row_count = 50;
    w.catalog.tables[table] = schema;
    Relation rel;
    for (const auto& [name, type] : schema.columns) rel.schema.push_back({table, name, type});
    for (int i = 1; i <= 50; ++i) {
      rel.rows.push_back({int64_t{i}, int64_t{i}, int64_t{i}, padded((table + "-p-").c_str(), i)});
    }
    w.data[table] = std::move(rel);
  }

  // queries with n = 2, 4, 6, 8 semantic filters over an 8-table chain
  for (int n : {2, 4, 6, 8}) {
    std::string from = "FROM u1";
    for (int k = 2; k <= 8; ++k) {
      from += " JOIN u" + std::to_string(k) + " ON u" + std::to_string(k - 1) + ".b = u" + std::to_string(k) + ".a";
    }
    std::string where;
    for (int k = 1; k <= 8; ++k) {
      where += std::string(k > 1 ? " AND " : "") + "u" + std::to_string(k) + ".id >= 1";
    }
    for (int k = 1; k <= n; ++k) {
      where += " AND SEMANTIC('{u" + std::to_string(k) + ".p} notable?')";
    }
    w.queries.push_back("SELECT u1.p, u8.p " + from + " WHERE " + where + ";");
  }
  return w;
}

Workload build_empty() {
  Workload w;
  w.name = "empty";
  TableSchema t;
  t.columns = {{"id", ColumnType::Integer}, {"payload", ColumnType::Text}};
  t.row_count = 0;
  w.catalog.tables["t"] = t;
  Relation rel;
  for (const auto& [name, type] : t.columns) rel.schema.push_back({"t", name, type});
  w.data["t"] = std::move(rel);
  w.queries.push_back("SELECT * FROM t;");
  return w;
}

}  // namespace

WorkloadSpec load_workload_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SemqlError(ErrorKind::Execute, "cannot open workload spec '" + path + "'");
  nlohmann::json j;
  in >> j;
  WorkloadSpec spec;
  spec.generator = j.at("generator").get<std::string>();
  spec.seed = j.value("seed", uint64_t{42});
  if (j.contains("params")) {
    for (auto it = j.at("params").begin(); it != j.at("params").end(); ++it) {
      spec.params[it.key()] = it.value().get<double>();
    }
  }
  return spec;
}

Workload generate_workload(const WorkloadSpec& spec) {
  Workload w;
  if (spec.generator == "fig1" || spec.generator == "alpha-sweep") {
    w = build_fig1();
    w.name = spec.generator;
  } else if (spec.generator == "chain5") {
    w = build_chain5();
  } else if (spec.generator == "sel-grid") {
    w = build_sel_grid();
  } else if (spec.generator == "overhead") {
    w = build_overhead();
  } else if (spec.generator == "empty") {
    w = build_empty();
  } else {
    throw SemqlError(ErrorKind::Execute, "unknown workload generator '" + spec.generator + "'");
  }
  w.oracle_seed = spec.seed;
  auto alpha = spec.params.find("alpha");
  if (alpha != spec.params.end()) w.alpha = alpha->second;
  return w;
}

void write_workload(const Workload& workload, const std::string& dir) {
  write_dataset(dir, workload.catalog, workload.data);
  nlohmann::json queries = nlohmann::json::array();
  for (const auto& q : workload.queries) queries.push_back(q);
  nlohmann::json per_template = nlohmann::json::object();
  for (const auto& [tmpl, sel] : workload.oracle_per_template) per_template[tmpl] = sel;
  nlohmann::json meta{{"alpha", workload.alpha},
                      {"name", workload.name},
                      {"oracle", nlohmann::json{{"default_selectivity", workload.oracle_default_selectivity},
                                                {"latency_ms", workload.oracle_latency_ms},
                                                {"mode", "mock"},
                                                {"per_predicate", per_template},
                                                {"seed", workload.oracle_seed}}},
                      {"queries", queries}};
  std::ofstream out(dir + "/workload.json");
  out << dump_canonical(meta);
}

}  // namespace semql
