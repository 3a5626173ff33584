#pragma once

#include <string>
#include <vector>

namespace semql {

enum class TokenKind { Identifier, Keyword, Number, String, Symbol, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;   // keywords uppercased, identifiers verbatim
  size_t position = 0;
};

// Tokenizes a query string. Keywords are case-insensitive, identifiers
// case-sensitive. Throws SemqlError(Parse) with a position on bad input.
std::vector<Token> tokenize(const std::string& sql);

}  // namespace semql
