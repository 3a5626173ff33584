#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>

#include "plan/plan_tree.hpp"
#include "plan/value.hpp"

namespace semql {

// The LLM stand-in behind semantic operators. Implementations must be
// deterministic for identical prompts when they claim to be (mock, recorded).
class SemanticOracle {
 public:
  virtual ~SemanticOracle() = default;

  // Evaluates a rendered prompt, producing a value of `output_type`
  // (Boolean for filters, Text/Integer for projections).
  virtual Value evaluate(const std::string& prompt, const SemanticPredicate& predicate) = 0;
};

// Seeded-hash oracle: a stable 64-bit hash of (seed, prompt) is normalized to
// [0,1) and thresholded at the per-predicate target selectivity for boolean
// results; typed outputs derive from the same hash. Identical output for
// identical prompt across runs and processes.
class MockOracle : public SemanticOracle {
 public:
  MockOracle(uint64_t seed, double default_selectivity, std::map<std::string, double> per_template_selectivity = {},
             int latency_ms = 0)
      : seed_(seed),
        default_selectivity_(default_selectivity),
        per_template_(std::move(per_template_selectivity)),
        latency_ms_(latency_ms) {}

  Value evaluate(const std::string& prompt, const SemanticPredicate& predicate) override;

  double unit_interval(const std::string& prompt) const;
  double target_selectivity(const SemanticPredicate& predicate) const;

 private:
  uint64_t seed_;
  double default_selectivity_;
  std::map<std::string, double> per_template_;
  int latency_ms_;
};

// Replays results from a prompt -> value map loaded from JSON.
class RecordedOracle : public SemanticOracle {
 public:
  explicit RecordedOracle(std::map<std::string, Value> entries) : entries_(std::move(entries)) {}
  static RecordedOracle from_file(const std::string& path);

  Value evaluate(const std::string& prompt, const SemanticPredicate& predicate) override;

 private:
  std::map<std::string, Value> entries_;
};

// Chat-completions-shaped JSON-over-HTTP backend. Endpoint and model come
// from SEMQL_ORACLE_ENDPOINT / SEMQL_ORACLE_MODEL (or explicit arguments);
// 3 attempts with exponential backoff, then the query aborts.
class RemoteOracle : public SemanticOracle {
 public:
  RemoteOracle(std::string endpoint, std::string model, int timeout_seconds = 30);
  static std::unique_ptr<RemoteOracle> from_environment();

  Value evaluate(const std::string& prompt, const SemanticPredicate& predicate) override;

 private:
  std::string endpoint_;
  std::string model_;
  int timeout_seconds_;
};

// Stable FNV-1a 64-bit hash (not std::hash: must agree across processes).
uint64_t stable_hash64(const std::string& text);

// Oracle spec strings: "mock:seed=42,sel=0.2[,latency_ms=10]",
// "recorded:<path>", "remote", or "file:<json path>" for a full config with
// per-predicate selectivities.
std::unique_ptr<SemanticOracle> make_oracle(const std::string& spec);

}  // namespace semql
