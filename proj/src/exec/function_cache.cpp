#include "exec/function_cache.hpp"

namespace semql {

FunctionCache::Shard& FunctionCache::shard_for(const std::string& key) {
  return shards_[std::hash<std::string>{}(key) % kShards];
}

std::optional<Value> FunctionCache::try_get(const std::string& key) {
  probes_.fetch_add(1, std::memory_order_relaxed);
  Shard& shard = shard_for(key);
  std::lock_guard<std::mutex> lock(shard.mutex);
  auto it = shard.entries.find(key);
  if (it == shard.entries.end()) return std::nullopt;
  hits_.fetch_add(1, std::memory_order_relaxed);
  return it->second;
}

const Value& FunctionCache::put_if_absent(const std::string& key, Value value) {
  Shard& shard = shard_for(key);
  std::lock_guard<std::mutex> lock(shard.mutex);
  auto [it, inserted] = shard.entries.emplace(key, std::move(value));
  return it->second;
}

void FunctionCache::clear() {
  for (auto& shard : shards_) {
    std::lock_guard<std::mutex> lock(shard.mutex);
    shard.entries.clear();
  }
  probes_.store(0);
  hits_.store(0);
}

}  // namespace semql
