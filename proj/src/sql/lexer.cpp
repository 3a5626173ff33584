#include "sql/lexer.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "common/error.hpp"

namespace semql {

namespace {

const std::set<std::string> kKeywords = {
    "SELECT", "FROM",  "WHERE", "AND",   "OR",    "JOIN",     "INNER", "CROSS", "ON",       "AS",
    "ORDER",  "BY",    "LIMIT", "WITH",  "ASC",   "DESC",     "BETWEEN", "IN",  "IS",       "NOT",
    "NULL",   "TRUE",  "FALSE", "SEMANTIC", "SEMANTIC_STRING", "SEMANTIC_INT"};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::vector<Token> tokenize(const std::string& sql) {
  std::vector<Token> out;
  size_t i = 0;
  const size_t n = sql.size();
  while (i < n) {
    char c = sql[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < n && sql[i + 1] == '-') {  // line comment
      while (i < n && sql[i] != '\n') ++i;
      continue;
    }
    size_t start = i;
    if (is_ident_start(c)) {
      while (i < n && is_ident_char(sql[i])) ++i;
      std::string word = sql.substr(start, i - start);
      std::string upper = word;
      std::transform(upper.begin(), upper.end(), upper.begin(),
                     [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
      if (kKeywords.count(upper)) {
        out.push_back({TokenKind::Keyword, upper, start});
      } else {
        out.push_back({TokenKind::Identifier, word, start});
      }
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(sql[i + 1])))) {
      bool seen_dot = false;
      while (i < n && (std::isdigit(static_cast<unsigned char>(sql[i])) || (sql[i] == '.' && !seen_dot))) {
        if (sql[i] == '.') seen_dot = true;
        ++i;
      }
      out.push_back({TokenKind::Number, sql.substr(start, i - start), start});
      continue;
    }
    if (c == '\'') {
      std::string text;
      ++i;
      while (true) {
        if (i >= n) throw SemqlError(ErrorKind::Parse, "unterminated string literal", start);
        if (sql[i] == '\'') {
          if (i + 1 < n && sql[i + 1] == '\'') {  // escaped quote
            text.push_back('\'');
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        text.push_back(sql[i]);
        ++i;
      }
      out.push_back({TokenKind::String, text, start});
      continue;
    }
    // multi-char symbols first
    if (i + 1 < n) {
      std::string two = sql.substr(i, 2);
      if (two == "<=" || two == ">=" || two == "<>" || two == "!=") {
        out.push_back({TokenKind::Symbol, two == "!=" ? "<>" : two, start});
        i += 2;
        continue;
      }
    }
    if (std::string("(),.*=<>;").find(c) != std::string::npos) {
      out.push_back({TokenKind::Symbol, std::string(1, c), start});
      ++i;
      continue;
    }
    throw SemqlError(ErrorKind::Parse, std::string("unexpected character '") + c + "'", start);
  }
  out.push_back({TokenKind::End, "", n});
  return out;
}

}  // namespace semql
