#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "common/error.hpp"
#include "sql/parser.hpp"
#include "test_support.hpp"

using namespace semql;

namespace {

// byte-level mutations over the corpus queries: flips, deletions,
// duplications, truncations, and token-boundary splices
std::string mutate(const std::string& base, std::mt19937_64& rng) {
  std::string out = base;
  int edits = 1 + static_cast<int>(rng() % 8);
  for (int e = 0; e < edits && !out.empty(); ++e) {
    size_t pos = rng() % out.size();
    switch (rng() % 5) {
      case 0:
        out[pos] = static_cast<char>(rng() % 96 + 32);
        break;
      case 1:
        out.erase(pos, 1 + rng() % 5);
        break;
      case 2:
        out.insert(pos, out.substr(rng() % out.size(), 1 + rng() % 7));
        break;
      case 3:
        out = out.substr(0, pos);
        break;
      case 4: {
        static const char* tokens[] = {"SELECT", "WHERE", "SEMANTIC('", "JOIN", "{", "}", "'", "(", ")", ",", "*"};
        out.insert(pos, tokens[rng() % 11]);
        break;
      }
    }
  }
  return out;
}

}  // namespace

// parser totality: every mutated input yields a tree or a positioned error,
// never a crash
TEST_CASE("10k-iteration fuzz over mutated corpus queries") {
  auto cases = semql::testing::corpus_cases();
  std::mt19937_64 rng(0x5eed);
  int parsed_ok = 0, rejected = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto& c = cases[i % cases.size()];
    std::string sql = mutate(c.sql, rng);
    try {
      auto tree = parse(sql, c.workload.catalog);
      CHECK(validate(tree).empty());
      parsed_ok++;
    } catch (const SemqlError& e) {
      CHECK((e.kind() == ErrorKind::Parse || e.kind() == ErrorKind::Bind));
      rejected++;
    }
  }
  CHECK(parsed_ok + rejected == 10000);
  CHECK(rejected > 0);  // mutations do break queries
}

TEST_CASE("degenerate inputs are positioned errors") {
  Catalog catalog;
  TableSchema t;
  t.columns = {{"k", ColumnType::Integer}};
  catalog.tables["t"] = t;
  for (const char* sql : {"", ";", "SELECT", "SELECT * FROM", "SELECT * FROM t WHERE", "((((", "'" , "{t.k}",
                          "SELECT * FROM t LIMIT 9999999999999999999999"}) {
    CHECK_THROWS_AS(parse(sql, catalog), SemqlError);
  }
}
