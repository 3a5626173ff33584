#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "exec/executor.hpp"
#include "exec/oracle.hpp"
#include "plan/plan_tree.hpp"

namespace semql {

// A fully specified synthetic workload: deterministic data (a pure function
// of the spec), queries, oracle configuration, and optimizer parameters.
struct Workload {
  std::string name;
  Catalog catalog;
  Dataset data;
  std::vector<std::string> queries;  // SQL text
  uint64_t oracle_seed = 42;
  double oracle_default_selectivity = 0.2;
  std::map<std::string, double> oracle_per_template;  // canonical template -> target selectivity
  int oracle_latency_ms = 0;
  double alpha = 1e-7;
  bool inject_exact_stats = true;

  std::unique_ptr<MockOracle> make_mock_oracle() const {
    return std::make_unique<MockOracle>(oracle_seed, oracle_default_selectivity, oracle_per_template,
                                        oracle_latency_ms);
  }
};

struct WorkloadSpec {
  std::string generator;  // fig1 | chain5 | alpha-sweep | sel-grid | overhead | empty
  uint64_t seed = 42;
  std::map<std::string, double> params;
};

WorkloadSpec load_workload_spec(const std::string& path);

// Builds the deterministic workload for a spec. The fig1 preset yields
// books=1000 rows, reviews=5000, exactly 3000 reviews with rating >= 3, and
// key multiplicities such that the filtered join output holds exactly 800
// distinct books and 2500 distinct reviews.
Workload generate_workload(const WorkloadSpec& spec);

// Writes <dir>/catalog.json, one CSV per table, the queries, and the oracle
// config; byte-identical across runs for a fixed spec.
void write_workload(const Workload& workload, const std::string& dir);

}  // namespace semql
