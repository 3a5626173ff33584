#include "exec/oracle.hpp"

#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "common/error.hpp"

namespace semql {

uint64_t stable_hash64(const std::string& text) {
  uint64_t h = 1469598103934665603ULL;  // FNV offset basis
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;  // FNV prime
  }
  return h;
}

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::string base36(uint64_t x, int digits) {
  static const char* alphabet = "0123456789abcdefghijklmnopqrstuvwxyz";
  std::string out(digits, '0');
  for (int i = digits - 1; i >= 0; --i) {
    out[i] = alphabet[x % 36];
    x /= 36;
  }
  return out;
}

}  // namespace

double MockOracle::unit_interval(const std::string& prompt) const {
  uint64_t h = splitmix64(stable_hash64(prompt) ^ splitmix64(seed_));
  return static_cast<double>(h >> 11) * (1.0 / 9007199254740992.0);  // 53-bit mantissa
}

double MockOracle::target_selectivity(const SemanticPredicate& predicate) const {
  auto it = per_template_.find(predicate.template_text);
  return it == per_template_.end() ? default_selectivity_ : it->second;
}

Value MockOracle::evaluate(const std::string& prompt, const SemanticPredicate& predicate) {
  if (latency_ms_ > 0) std::this_thread::sleep_for(std::chrono::milliseconds(latency_ms_));
  uint64_t h = splitmix64(stable_hash64(prompt) ^ splitmix64(seed_));
  switch (predicate.output_type) {
    case ColumnType::Boolean:
      return unit_interval(prompt) < target_selectivity(predicate);
    case ColumnType::Integer:
      return static_cast<int64_t>(1 + h % 5);
    case ColumnType::Float:
      return static_cast<double>(h % 1000) / 100.0;
    case ColumnType::Text:
      return "resp-" + base36(h, 8);
  }
  return std::monostate{};
}

RecordedOracle RecordedOracle::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SemqlError(ErrorKind::Execute, "cannot open recorded oracle file '" + path + "'");
  nlohmann::json j;
  in >> j;
  std::map<std::string, Value> entries;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& v = it.value();
    if (v.is_boolean()) {
      entries[it.key()] = v.get<bool>();
    } else if (v.is_number_integer()) {
      entries[it.key()] = v.get<int64_t>();
    } else if (v.is_number_float()) {
      entries[it.key()] = v.get<double>();
    } else {
      entries[it.key()] = v.get<std::string>();
    }
  }
  return RecordedOracle(std::move(entries));
}

Value RecordedOracle::evaluate(const std::string& prompt, const SemanticPredicate&) {
  auto it = entries_.find(prompt);
  if (it == entries_.end()) {
    throw SemqlError(ErrorKind::Execute, "recorded oracle has no entry for prompt: " + prompt);
  }
  return it->second;
}

RemoteOracle::RemoteOracle(std::string endpoint, std::string model, int timeout_seconds)
    : endpoint_(std::move(endpoint)), model_(std::move(model)), timeout_seconds_(timeout_seconds) {}

std::unique_ptr<RemoteOracle> RemoteOracle::from_environment() {
  const char* endpoint = std::getenv("SEMQL_ORACLE_ENDPOINT");
  const char* model = std::getenv("SEMQL_ORACLE_MODEL");
  if (!endpoint || !model) {
    throw SemqlError(ErrorKind::Execute, "remote oracle requires SEMQL_ORACLE_ENDPOINT and SEMQL_ORACLE_MODEL");
  }
  return std::make_unique<RemoteOracle>(endpoint, model);
}

Value RemoteOracle::evaluate(const std::string& prompt, const SemanticPredicate& predicate) {
  nlohmann::json body{{"model", model_},
                      {"messages", nlohmann::json::array({nlohmann::json{{"role", "user"}, {"content", prompt}}})}};
  std::string content;
  std::string last_error;
  for (int attempt = 0; attempt < 3; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(250 << attempt));
    try {
      httplib::Client client(endpoint_);
      client.set_read_timeout(timeout_seconds_, 0);
      const char* key = std::getenv("SEMQL_ORACLE_API_KEY");
      httplib::Headers headers;
      if (key) headers.emplace("Authorization", std::string("Bearer ") + key);
      auto res = client.Post("/v1/chat/completions", headers, body.dump(), "application/json");
      if (!res || res->status != 200) {
        last_error = res ? "status " + std::to_string(res->status) : "connection failed";
        continue;
      }
      auto j = nlohmann::json::parse(res->body);
      content = j.at("choices").at(0).at("message").at("content").get<std::string>();
      break;
    } catch (const std::exception& e) {
      last_error = e.what();
    }
  }
  if (content.empty() && !last_error.empty()) {
    throw SemqlError(ErrorKind::Execute, "remote oracle failed after 3 attempts: " + last_error);
  }
  switch (predicate.output_type) {
    case ColumnType::Boolean: {
      std::string lowered;
      for (char c : content) lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      return lowered.find("yes") != std::string::npos || lowered.find("true") != std::string::npos;
    }
    case ColumnType::Integer: {
      // strict digits-only parse; failures map to NULL at the call site
      std::string digits;
      for (char c : content) {
        if (std::isdigit(static_cast<unsigned char>(c))) digits.push_back(c);
      }
      if (digits.empty()) return std::monostate{};
      return static_cast<int64_t>(std::stoll(digits));
    }
    default:
      return content;
  }
}

namespace {

std::unique_ptr<SemanticOracle> oracle_from_config(const nlohmann::json& j) {
  std::string mode = j.value("mode", "mock");
  if (mode == "mock") {
    std::map<std::string, double> per_template;
    if (j.contains("per_predicate")) {
      for (auto it = j.at("per_predicate").begin(); it != j.at("per_predicate").end(); ++it) {
        per_template[it.key()] = it.value().get<double>();
      }
    }
    return std::make_unique<MockOracle>(j.value("seed", uint64_t{42}), j.value("default_selectivity", 0.2),
                                        std::move(per_template), j.value("latency_ms", 0));
  }
  if (mode == "recorded") {
    return std::make_unique<RecordedOracle>(RecordedOracle::from_file(j.at("path").get<std::string>()));
  }
  if (mode == "remote") return RemoteOracle::from_environment();
  throw SemqlError(ErrorKind::Execute, "unknown oracle mode '" + mode + "'");
}

}  // namespace

std::unique_ptr<SemanticOracle> make_oracle(const std::string& spec) {
  if (spec.rfind("file:", 0) == 0) {
    std::ifstream in(spec.substr(5));
    if (!in) throw SemqlError(ErrorKind::Execute, "cannot open oracle config '" + spec.substr(5) + "'");
    nlohmann::json j;
    in >> j;
    return oracle_from_config(j);
  }
  if (spec.rfind("recorded:", 0) == 0) {
    return std::make_unique<RecordedOracle>(RecordedOracle::from_file(spec.substr(9)));
  }
  if (spec == "remote") return RemoteOracle::from_environment();
  if (spec.rfind("mock", 0) == 0) {
    uint64_t seed = 42;
    double sel = 0.2;
    int latency_ms = 0;
    if (spec.size() > 5 && spec[4] == ':') {
      std::string args = spec.substr(5);
      size_t pos = 0;
      while (pos < args.size()) {
        size_t end = args.find(',', pos);
        if (end == std::string::npos) end = args.size();
        std::string kv = args.substr(pos, end - pos);
        size_t eq = kv.find('=');
        if (eq == std::string::npos) throw SemqlError(ErrorKind::Execute, "bad oracle spec '" + spec + "'");
        std::string key = kv.substr(0, eq);
        std::string value = kv.substr(eq + 1);
        if (key == "seed") {
          seed = std::stoull(value);
        } else if (key == "sel") {
          sel = std::stod(value);
        } else if (key == "latency_ms") {
          latency_ms = std::stoi(value);
        } else {
          throw SemqlError(ErrorKind::Execute, "unknown oracle option '" + key + "'");
        }
        pos = end + 1;
      }
    }
    return std::make_unique<MockOracle>(seed, sel, std::map<std::string, double>{}, latency_ms);
  }
  throw SemqlError(ErrorKind::Execute, "unknown oracle spec '" + spec + "'");
}

}  // namespace semql
