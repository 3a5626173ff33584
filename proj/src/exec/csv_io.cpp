#include "exec/csv_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "common/error.hpp"
#include "plan/plan_json.hpp"

namespace semql {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        quoted = false;
        ++i;
        continue;
      }
      field.push_back(c);
      ++i;
      continue;
    }
    if (c == '"') {
      quoted = true;
      ++i;
      continue;
    }
    if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
      ++i;
      continue;
    }
    field.push_back(c);
    ++i;
  }
  out.push_back(std::move(field));
  return out;
}

std::string escape_csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

}  // namespace

Relation read_csv(const std::string& path, const std::string& table, const TableSchema& schema) {
  std::ifstream in(path);
  if (!in) throw SemqlError(ErrorKind::Execute, "cannot open CSV file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw SemqlError(ErrorKind::Execute, "CSV file '" + path + "' has no header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv_line(line);
  if (header.size() != schema.columns.size()) {
    throw SemqlError(ErrorKind::Execute, "CSV header of '" + path + "' does not match schema");
  }
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] != schema.columns[i].first) {
      throw SemqlError(ErrorKind::Execute,
                       "CSV column '" + header[i] + "' does not match schema column '" + schema.columns[i].first + "'");
    }
  }
  Relation out;
  for (const auto& [name, type] : schema.columns) out.schema.push_back({table, name, type});
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == EOF) break;
    auto fields = split_csv_line(line);
    if (fields.size() != schema.columns.size()) {
      throw SemqlError(ErrorKind::Execute, "CSV row arity mismatch in '" + path + "'");
    }
    Row row;
    row.reserve(fields.size());
    for (size_t i = 0; i < fields.size(); ++i) {
      row.push_back(parse_value(fields[i], schema.columns[i].second));
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

void write_csv(const std::string& path, const Relation& relation) {
  std::ofstream out(path);
  if (!out) throw SemqlError(ErrorKind::Execute, "cannot write CSV file '" + path + "'");
  for (size_t i = 0; i < relation.schema.size(); ++i) {
    if (i > 0) out << ',';
    out << escape_csv_field(relation.schema[i].name);
  }
  out << '\n';
  for (const auto& row : relation.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << ',';
      if (!is_null(row[i])) out << escape_csv_field(canonical_text(row[i]));
    }
    out << '\n';
  }
}

Catalog load_dataset_catalog(const std::string& dir) {
  std::string path = dir + "/catalog.json";
  std::ifstream in(path);
  if (!in) throw SemqlError(ErrorKind::Execute, "cannot open dataset catalog '" + path + "'");
  nlohmann::json j;
  in >> j;
  return catalog_from_json(j);
}

Dataset load_dataset(const std::string& dir, const Catalog& catalog) {
  Dataset out;
  for (const auto& [table, schema] : catalog.tables) {
    out[table] = read_csv(dir + "/" + table + ".csv", table, schema);
  }
  return out;
}

void write_dataset(const std::string& dir, const Catalog& catalog, const Dataset& data) {
  std::filesystem::create_directories(dir);
  std::ofstream cat(dir + "/catalog.json");
  cat << dump_canonical(catalog_to_json(catalog));
  for (const auto& [table, relation] : data) {
    write_csv(dir + "/" + table + ".csv", relation);
  }
}

}  // namespace semql
