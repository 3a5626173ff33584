#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "plan/value.hpp"

namespace semql {

// Prompt-keyed memo cache shared by all semantic operators of one query
// execution. Keys are rendered prompt strings, so they carry both the
// predicate template and the input tuple values. Bucket-level locking; the
// first writer wins per key and losers observe the winner's value. Entries
// are never evicted within one query; callers clear between queries.
class FunctionCache {
 public:
  std::optional<Value> try_get(const std::string& key);

  // Returns the stored value: the given one if this call inserted it, the
  // earlier winner's otherwise.
  const Value& put_if_absent(const std::string& key, Value value);

  // A probe that found its key already pending evaluation in the current
  // batch: the row observes the winner's value, so it counts as a hit.
  void record_pending_hit() { hits_.fetch_add(1, std::memory_order_relaxed); }

  void clear();

  uint64_t probes() const { return probes_.load(); }
  uint64_t hits() const { return hits_.load(); }

 private:
  static constexpr size_t kShards = 64;

  struct Shard {
    std::mutex mutex;
    std::unordered_map<std::string, Value> entries;
  };

  Shard& shard_for(const std::string& key);

  Shard shards_[kShards];
  std::atomic<uint64_t> probes_{0};
  std::atomic<uint64_t> hits_{0};
};

}  // namespace semql
