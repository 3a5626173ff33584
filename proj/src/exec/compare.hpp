#pragma once

#include "exec/executor.hpp"

namespace semql {

struct EquivalenceReport {
  bool equal = false;
  double precision = 1.0;  // of b against a
  double recall = 1.0;
  double f1 = 1.0;
  ExecutionMetrics metrics_a;
  ExecutionMetrics metrics_b;
};

// Executes both trees over the same data with fresh caches and reports
// multiset equality of the results (column order normalized) plus the F1 of
// b's rows against a's.
EquivalenceReport run_and_compare(const PlanTree& tree_a, const PlanTree& tree_b, const Dataset& data,
                                  SemanticOracle& oracle, const ExecOptions& options = {});

// F1 over row multisets: tp = sum of min(count_a, count_b) per distinct row.
double multiset_f1(const Relation& a, const Relation& b, double* precision = nullptr, double* recall = nullptr);

}  // namespace semql
