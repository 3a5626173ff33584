#include "exec/relation.hpp"

#include <algorithm>

namespace semql {

int Relation::column_index(const ColumnRef& ref) const {
  for (size_t i = 0; i < schema.size(); ++i) {
    if (schema[i].table == ref.table && schema[i].name == ref.column) return static_cast<int>(i);
  }
  return -1;
}

int Relation::column_index_by_name(const std::string& name) const {
  for (size_t i = 0; i < schema.size(); ++i) {
    if (schema[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

std::vector<std::string> row_keys(const Relation& r) {
  // column order normalized by sorting on (table, name)
  std::vector<size_t> order(r.schema.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (r.schema[a].table != r.schema[b].table) return r.schema[a].table < r.schema[b].table;
    return r.schema[a].name < r.schema[b].name;
  });
  std::vector<std::string> keys;
  keys.reserve(r.rows.size());
  for (const auto& row : r.rows) {
    std::string key;
    for (size_t i : order) {
      key += is_null(row[i]) ? std::string("\x01") : canonical_text(row[i]);
      key.push_back('\x1f');
    }
    keys.push_back(std::move(key));
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

bool relations_equal(const Relation& a, const Relation& b) {
  if (a.rows.size() != b.rows.size()) return false;
  return row_keys(a) == row_keys(b);
}

}  // namespace semql
