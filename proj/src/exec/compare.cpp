#include "exec/compare.hpp"

#include <map>

namespace semql {

double multiset_f1(const Relation& a, const Relation& b, double* precision_out, double* recall_out) {
  auto keys_a = row_keys(a);
  auto keys_b = row_keys(b);
  std::map<std::string, size_t> count_a;
  for (const auto& k : keys_a) count_a[k]++;
  size_t tp = 0;
  std::map<std::string, size_t> used;
  for (const auto& k : keys_b) {
    auto it = count_a.find(k);
    if (it != count_a.end() && used[k] < it->second) {
      used[k]++;
      tp++;
    }
  }
  double precision = keys_b.empty() ? (keys_a.empty() ? 1.0 : 0.0) : static_cast<double>(tp) / keys_b.size();
  double recall = keys_a.empty() ? (keys_b.empty() ? 1.0 : 0.0) : static_cast<double>(tp) / keys_a.size();
  if (precision_out) *precision_out = precision;
  if (recall_out) *recall_out = recall;
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

EquivalenceReport run_and_compare(const PlanTree& tree_a, const PlanTree& tree_b, const Dataset& data,
                                  SemanticOracle& oracle, const ExecOptions& options) {
  EquivalenceReport report;
  FunctionCache cache_a;
  auto result_a = execute(tree_a, data, oracle, cache_a, options);
  FunctionCache cache_b;
  auto result_b = execute(tree_b, data, oracle, cache_b, options);
  report.metrics_a = result_a.metrics;
  report.metrics_b = result_b.metrics;
  report.equal = relations_equal(result_a.output, result_b.output);
  if (report.equal) {
    report.precision = report.recall = report.f1 = 1.0;
  } else {
    report.f1 = multiset_f1(result_a.output, result_b.output, &report.precision, &report.recall);
  }
  return report;
}

}  // namespace semql
