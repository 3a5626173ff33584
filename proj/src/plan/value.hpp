#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace semql {

enum class ColumnType { Text, Integer, Float, Boolean };

std::string column_type_name(ColumnType type);
std::optional<ColumnType> column_type_from_name(const std::string& name);

// A cell value. monostate encodes SQL NULL.
using Value = std::variant<std::monostate, int64_t, double, bool, std::string>;

inline bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

// Canonical, locale-free text form used for prompt rendering and CSV output.
// Integers render as plain decimal, floats via shortest round-trip, booleans
// as true/false, NULL as "NULL".
std::string canonical_text(const Value& v);

// Three-valued-logic comparison: nullopt when either side is NULL.
std::optional<int> compare_values(const Value& a, const Value& b);

bool value_equal(const Value& a, const Value& b);

// Parses `text` as `type`; empty text yields NULL.
Value parse_value(const std::string& text, ColumnType type);

}  // namespace semql
