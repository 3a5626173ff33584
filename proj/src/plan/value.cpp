#include "plan/value.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "common/error.hpp"

namespace semql {

std::string column_type_name(ColumnType type) {
  switch (type) {
    case ColumnType::Text:
      return "text";
    case ColumnType::Integer:
      return "integer";
    case ColumnType::Float:
      return "float";
    case ColumnType::Boolean:
      return "boolean";
  }
  return "text";
}

std::optional<ColumnType> column_type_from_name(const std::string& name) {
  if (name == "text") return ColumnType::Text;
  if (name == "integer") return ColumnType::Integer;
  if (name == "float") return ColumnType::Float;
  if (name == "boolean") return ColumnType::Boolean;
  return std::nullopt;
}

std::string canonical_text(const Value& v) {
  if (is_null(v)) return "NULL";
  if (const auto* i = std::get_if<int64_t>(&v)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&v)) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), *d);
    return std::string(buf, res.ptr);
  }
  if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  return std::get<std::string>(v);
}

namespace {

std::optional<double> numeric_of(const Value& v) {
  if (const auto* i = std::get_if<int64_t>(&v)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* b = std::get_if<bool>(&v)) return *b ? 1.0 : 0.0;
  return std::nullopt;
}

}  // namespace

std::optional<int> compare_values(const Value& a, const Value& b) {
  if (is_null(a) || is_null(b)) return std::nullopt;
  const auto* sa = std::get_if<std::string>(&a);
  const auto* sb = std::get_if<std::string>(&b);
  if (sa && sb) return sa->compare(*sb) < 0 ? -1 : (*sa == *sb ? 0 : 1);
  auto na = numeric_of(a);
  auto nb = numeric_of(b);
  if (na && nb) {
    if (*na < *nb) return -1;
    if (*na > *nb) return 1;
    return 0;
  }
  // string vs numeric never compares equal; order strings after numerics
  if (sa) return 1;
  return -1;
}

bool value_equal(const Value& a, const Value& b) {
  if (is_null(a) && is_null(b)) return true;
  if (is_null(a) || is_null(b)) return false;
  auto c = compare_values(a, b);
  return c.has_value() && *c == 0;
}

Value parse_value(const std::string& text, ColumnType type) {
  if (text.empty()) return std::monostate{};
  switch (type) {
    case ColumnType::Text:
      return text;
    case ColumnType::Integer: {
      int64_t out = 0;
      auto res = std::from_chars(text.data(), text.data() + text.size(), out);
      if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw SemqlError(ErrorKind::Execute, "cannot parse integer value '" + text + "'");
      }
      return out;
    }
    case ColumnType::Float: {
      char* end = nullptr;
      double out = std::strtod(text.c_str(), &end);
      if (end != text.c_str() + text.size()) {
        throw SemqlError(ErrorKind::Execute, "cannot parse float value '" + text + "'");
      }
      return out;
    }
    case ColumnType::Boolean: {
      if (text == "true" || text == "1") return true;
      if (text == "false" || text == "0") return false;
      throw SemqlError(ErrorKind::Execute, "cannot parse boolean value '" + text + "'");
    }
  }
  return std::monostate{};
}

}  // namespace semql
