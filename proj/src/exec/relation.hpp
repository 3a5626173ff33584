#pragma once

#include <vector>

#include "plan/plan_tree.hpp"
#include "plan/value.hpp"

namespace semql {

using Row = std::vector<Value>;

// Column-typed row batch with a bound schema. Values are nullable.
struct Relation {
  std::vector<OutputColumn> schema;
  std::vector<Row> rows;

  int column_index(const ColumnRef& ref) const;
  int column_index_by_name(const std::string& name) const;
};

// Multiset equality after normalizing column order (columns matched by
// (table, name) identity).
bool relations_equal(const Relation& a, const Relation& b);

// Sorted canonical key strings, one per row; used for multiset comparison
// and F1 computation.
std::vector<std::string> row_keys(const Relation& r);

}  // namespace semql
