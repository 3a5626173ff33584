#include "exec/executor.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <set>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "common/error.hpp"

namespace semql {

namespace {

struct PromptSegment {
  std::string literal;
  int column_index = -1;  // -1: trailing literal only
};

std::vector<PromptSegment> compile_template(const SemanticPredicate& predicate,
                                            const std::vector<int>& column_indexes) {
  std::vector<PromptSegment> segments;
  const std::string& text = predicate.template_text;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t open = text.find('{', pos);
    if (open == std::string::npos) break;
    size_t close = text.find('}', open + 1);
    if (close == std::string::npos) break;
    std::string token = text.substr(open + 1, close - open - 1);
    int index = -1;
    for (size_t i = 0; i < predicate.referenced_columns.size(); ++i) {
      if (predicate.referenced_columns[i].to_string() == token) {
        index = column_indexes[i];
        break;
      }
    }
    segments.push_back({text.substr(pos, open - pos), index});
    pos = close + 1;
  }
  segments.push_back({text.substr(pos), -1});
  return segments;
}

class Executor {
 public:
  Executor(const PlanTree& tree, const Dataset& data, SemanticOracle& oracle, FunctionCache& cache,
           const ExecOptions& options)
      : tree_(tree), data_(data), oracle_(oracle), cache_(cache), options_(options) {}

  ExecResult run() {
    auto start = std::chrono::steady_clock::now();
    ExecResult result;
    result.output = eval(tree_.root);
    result.metrics = std::move(metrics_);
    result.metrics.cache_probes = cache_.probes();
    result.metrics.cache_hits = cache_.hits();
    result.metrics.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return result;
  }

  Relation eval(NodeId id) {
    const PlanNode& node = tree_.node(id);
    Relation out;
    switch (node.kind) {
      case NodeKind::TableScan:
        out = eval_scan(node);
        break;
      case NodeKind::RelFilter:
        out = eval_rel_filter(node);
        break;
      case NodeKind::Project:
        out = eval_project(node);
        break;
      case NodeKind::InnerJoin:
        out = eval_inner_join(node);
        break;
      case NodeKind::CrossJoin:
        out = eval_cross_join(node);
        break;
      case NodeKind::Aggregate:
        out = eval_aggregate(node);
        break;
      case NodeKind::Limit:
        out = eval_limit(node);
        break;
      case NodeKind::Union:
        out = eval_union(node);
        break;
      case NodeKind::Sort:
        out = eval_sort(node);
        break;
      case NodeKind::SemFilter:
        out = eval_sem_filter(node);
        break;
      case NodeKind::SemProject:
        out = eval_sem_project(node);
        break;
    }
    metrics_.rows_per_node[id] = out.rows.size();
    return out;
  }

 private:
  Relation eval_scan(const PlanNode& node) {
    const auto& table = std::get<TableScanPayload>(node.payload).table;
    auto it = data_.find(table);
    if (it == data_.end()) throw SemqlError(ErrorKind::Execute, "no data bound for table '" + table + "'");
    return it->second;
  }

  static bool comparison_matches(const Comparison& cmp, const Row& row, int lhs_index, int rhs_index) {
    const Value& lhs = row[lhs_index];
    switch (cmp.op) {
      case CompareOp::IsNull:
        return is_null(lhs);
      case CompareOp::IsNotNull:
        return !is_null(lhs);
      case CompareOp::InList: {
        for (const auto& v : cmp.operands) {
          if (value_equal(lhs, v)) return true;
        }
        return false;
      }
      case CompareOp::Between: {
        auto lo = compare_values(lhs, cmp.operands[0]);
        auto hi = compare_values(lhs, cmp.operands[1]);
        return lo && hi && *lo >= 0 && *hi <= 0;
      }
      default:
        break;
    }
    const Value& rhs = cmp.rhs_column ? row[rhs_index] : cmp.operands[0];
    auto c = compare_values(lhs, rhs);
    if (!c) return false;  // NULL comparisons are not true
    switch (cmp.op) {
      case CompareOp::Equal:
        return *c == 0;
      case CompareOp::NotEqual:
        return *c != 0;
      case CompareOp::Less:
        return *c < 0;
      case CompareOp::LessEqual:
        return *c <= 0;
      case CompareOp::Greater:
        return *c > 0;
      case CompareOp::GreaterEqual:
        return *c >= 0;
      default:
        return false;
    }
  }

  Relation eval_rel_filter(const PlanNode& node) {
    Relation input = eval(node.children[0]);
    const auto& conjuncts = std::get<RelFilterPayload>(node.payload).conjuncts;
    std::vector<std::pair<int, int>> indexes;
    for (const auto& cmp : conjuncts) {
      int lhs = input.column_index(cmp.column);
      int rhs = cmp.rhs_column ? input.column_index(*cmp.rhs_column) : -1;
      if (lhs < 0 || (cmp.rhs_column && rhs < 0)) {
        throw SemqlError(ErrorKind::Execute, "filter column not found in input");
      }
      indexes.emplace_back(lhs, rhs);
    }
    Relation out;
    out.schema = input.schema;
    for (auto& row : input.rows) {
      bool pass = true;
      for (size_t i = 0; i < conjuncts.size(); ++i) {
        if (!comparison_matches(conjuncts[i], row, indexes[i].first, indexes[i].second)) {
          pass = false;
          break;
        }
      }
      if (pass) out.rows.push_back(std::move(row));
    }
    return out;
  }

  Relation eval_project(const PlanNode& node) {
    Relation input = eval(node.children[0]);
    const auto& columns = std::get<ProjectPayload>(node.payload).columns;
    std::vector<int> indexes;
    Relation out;
    for (const auto& ref : columns) {
      int idx = input.column_index(ref);
      if (idx < 0) throw SemqlError(ErrorKind::Execute, "projected column " + ref.to_string() + " not found");
      indexes.push_back(idx);
      out.schema.push_back(input.schema[idx]);
    }
    out.rows.reserve(input.rows.size());
    for (const auto& row : input.rows) {
      Row projected;
      projected.reserve(indexes.size());
      for (int idx : indexes) projected.push_back(row[idx]);
      out.rows.push_back(std::move(projected));
    }
    return out;
  }

  Relation eval_inner_join(const PlanNode& node) {
    Relation left = eval(node.children[0]);
    Relation right = eval(node.children[1]);
    const auto& keys = std::get<InnerJoinPayload>(node.payload).keys;
    std::vector<int> left_idx, right_idx;
    for (const auto& [l, r] : keys) {
      int li = left.column_index(l);
      int ri = right.column_index(r);
      if (li < 0 || ri < 0) throw SemqlError(ErrorKind::Execute, "join key column not found");
      left_idx.push_back(li);
      right_idx.push_back(ri);
    }
    Relation out;
    out.schema = left.schema;
    out.schema.insert(out.schema.end(), right.schema.begin(), right.schema.end());
    if (keys.empty()) {  // keyless inner join behaves as a cross product
      for (const auto& lrow : left.rows) {
        for (const auto& rrow : right.rows) {
          Row row = lrow;
          row.insert(row.end(), rrow.begin(), rrow.end());
          out.rows.push_back(std::move(row));
        }
      }
      return out;
    }
    // hash right side; NULL keys never match
    std::unordered_map<std::string, std::vector<size_t>> table;
    for (size_t i = 0; i < right.rows.size(); ++i) {
      std::string key;
      bool null_key = false;
      for (int idx : right_idx) {
        if (is_null(right.rows[i][idx])) {
          null_key = true;
          break;
        }
        key += canonical_text(right.rows[i][idx]);
        key.push_back('\x1f');
      }
      if (!null_key) table[key].push_back(i);
    }
    for (const auto& lrow : left.rows) {
      std::string key;
      bool null_key = false;
      for (int idx : left_idx) {
        if (is_null(lrow[idx])) {
          null_key = true;
          break;
        }
        key += canonical_text(lrow[idx]);
        key.push_back('\x1f');
      }
      if (null_key) continue;
      auto it = table.find(key);
      if (it == table.end()) continue;
      for (size_t ri : it->second) {
        Row row = lrow;
        row.insert(row.end(), right.rows[ri].begin(), right.rows[ri].end());
        out.rows.push_back(std::move(row));
      }
    }
    return out;
  }

  Relation eval_cross_join(const PlanNode& node) {
    Relation left = eval(node.children[0]);
    Relation right = eval(node.children[1]);
    Relation out;
    out.schema = left.schema;
    out.schema.insert(out.schema.end(), right.schema.begin(), right.schema.end());
    out.rows.reserve(left.rows.size() * right.rows.size());
    for (const auto& lrow : left.rows) {
      for (const auto& rrow : right.rows) {
        Row row = lrow;
        row.insert(row.end(), rrow.begin(), rrow.end());
        out.rows.push_back(std::move(row));
      }
    }
    return out;
  }

  Relation eval_aggregate(const PlanNode& node) {
    Relation input = eval(node.children[0]);
    const auto& payload = std::get<AggregatePayload>(node.payload);
    std::vector<int> group_idx;
    for (const auto& g : payload.group_by) {
      int idx = input.column_index(g);
      if (idx < 0) throw SemqlError(ErrorKind::Execute, "group-by column not found");
      group_idx.push_back(idx);
    }
    std::vector<int> agg_idx;
    for (const auto& a : payload.aggregates) {
      int idx = -1;
      if (a.column) {
        idx = input.column_index(*a.column);
        if (idx < 0) throw SemqlError(ErrorKind::Execute, "aggregate column not found");
      }
      agg_idx.push_back(idx);
    }

    struct Group {
      Row key_values;
      std::vector<Value> accumulators;
      std::vector<uint64_t> counts;
    };
    std::vector<Group> groups;  // insertion order keeps output deterministic
    std::unordered_map<std::string, size_t> index;
    for (const auto& row : input.rows) {
      std::string key;
      for (int idx : group_idx) {
        key += is_null(row[idx]) ? std::string("\x01") : canonical_text(row[idx]);
        key.push_back('\x1f');
      }
      auto [it, inserted] = index.emplace(key, groups.size());
      if (inserted) {
        Group g;
        for (int idx : group_idx) g.key_values.push_back(row[idx]);
        g.accumulators.assign(payload.aggregates.size(), std::monostate{});
        g.counts.assign(payload.aggregates.size(), 0);
        groups.push_back(std::move(g));
      }
      Group& g = groups[it->second];
      for (size_t i = 0; i < payload.aggregates.size(); ++i) {
        const auto& a = payload.aggregates[i];
        if (a.op == AggregateOp::CountStar) {
          g.counts[i]++;
          continue;
        }
        const Value& v = row[agg_idx[i]];
        if (is_null(v)) continue;
        g.counts[i]++;
        switch (a.op) {
          case AggregateOp::Count:
            break;
          case AggregateOp::Sum: {
            if (is_null(g.accumulators[i])) {
              g.accumulators[i] = v;
            } else if (std::holds_alternative<int64_t>(g.accumulators[i]) && std::holds_alternative<int64_t>(v)) {
              g.accumulators[i] = std::get<int64_t>(g.accumulators[i]) + std::get<int64_t>(v);
            } else {
              double acc = std::holds_alternative<int64_t>(g.accumulators[i])
                               ? static_cast<double>(std::get<int64_t>(g.accumulators[i]))
                               : std::get<double>(g.accumulators[i]);
              double val =
                  std::holds_alternative<int64_t>(v) ? static_cast<double>(std::get<int64_t>(v)) : std::get<double>(v);
              g.accumulators[i] = acc + val;
            }
            break;
          }
          case AggregateOp::Min: {
            if (is_null(g.accumulators[i]) || *compare_values(v, g.accumulators[i]) < 0) g.accumulators[i] = v;
            break;
          }
          case AggregateOp::Max: {
            if (is_null(g.accumulators[i]) || *compare_values(v, g.accumulators[i]) > 0) g.accumulators[i] = v;
            break;
          }
          default:
            break;
        }
      }
    }

    Relation out;
    for (int idx : group_idx) out.schema.push_back(input.schema[idx]);
    for (size_t i = 0; i < payload.aggregates.size(); ++i) {
      const auto& a = payload.aggregates[i];
      ColumnType type = ColumnType::Integer;
      if ((a.op == AggregateOp::Sum || a.op == AggregateOp::Min || a.op == AggregateOp::Max) && agg_idx[i] >= 0) {
        type = input.schema[agg_idx[i]].type;
      }
      out.schema.push_back({"", a.output_name, type});
    }
    for (auto& g : groups) {
      Row row = g.key_values;
      for (size_t i = 0; i < payload.aggregates.size(); ++i) {
        const auto& a = payload.aggregates[i];
        if (a.op == AggregateOp::CountStar || a.op == AggregateOp::Count) {
          row.push_back(static_cast<int64_t>(g.counts[i]));
        } else {
          row.push_back(g.accumulators[i]);
        }
      }
      out.rows.push_back(std::move(row));
    }
    return out;
  }

  Relation eval_limit(const PlanNode& node) {
    Relation input = eval(node.children[0]);
    uint64_t count = std::get<LimitPayload>(node.payload).count;
    if (input.rows.size() > count) input.rows.resize(count);
    return input;
  }

  Relation eval_union(const PlanNode& node) {
    Relation left = eval(node.children[0]);
    Relation right = eval(node.children[1]);
    if (left.schema.size() != right.schema.size()) {
      throw SemqlError(ErrorKind::Execute, "union inputs have mismatched arity");
    }
    for (auto& row : right.rows) left.rows.push_back(std::move(row));
    return left;
  }

  Relation eval_sort(const PlanNode& node) {
    Relation input = eval(node.children[0]);
    const auto& keys = std::get<SortPayload>(node.payload).keys;
    std::vector<std::pair<int, bool>> indexes;
    for (const auto& k : keys) {
      int idx = input.column_index(k.column);
      if (idx < 0) throw SemqlError(ErrorKind::Execute, "sort column not found");
      indexes.emplace_back(idx, k.descending);
    }
    std::stable_sort(input.rows.begin(), input.rows.end(), [&](const Row& a, const Row& b) {
      for (const auto& [idx, desc] : indexes) {
        // NULLs sort first
        bool an = is_null(a[idx]), bn = is_null(b[idx]);
        if (an != bn) return desc ? bn : an;
        if (an && bn) continue;
        auto c = compare_values(a[idx], b[idx]);
        if (*c != 0) return desc ? *c > 0 : *c < 0;
      }
      return false;
    });
    return input;
  }

  // Evaluates the distinct uncached prompts of one batch, optionally in
  // parallel. Prompts are deduplicated before any oracle call, so k distinct
  // prompts cost exactly k calls regardless of thread count.
  void evaluate_prompts(const std::vector<std::string>& prompts, const SemanticPredicate& predicate, NodeId node_id,
                        std::unordered_map<std::string, Value>& results) {
    metrics_.llm_calls += prompts.size();
    metrics_.llm_calls_per_node[node_id] += prompts.size();
    if (!options_.parallel_semantic_eval || prompts.size() < 2) {
      for (const auto& prompt : prompts) {
        results[prompt] = cache_.put_if_absent(prompt, oracle_.evaluate(prompt, predicate));
      }
      return;
    }
    std::vector<Value> values(prompts.size());
    std::atomic<size_t> next{0};
    size_t worker_count = std::min(options_.threads, prompts.size());
    std::vector<std::thread> workers;
    workers.reserve(worker_count);
    for (size_t w = 0; w < worker_count; ++w) {
      workers.emplace_back([&]() {
        while (true) {
          size_t i = next.fetch_add(1);
          if (i >= prompts.size()) break;
          values[i] = oracle_.evaluate(prompts[i], predicate);
        }
      });
    }
    for (auto& t : workers) t.join();
    for (size_t i = 0; i < prompts.size(); ++i) {
      results[prompts[i]] = cache_.put_if_absent(prompts[i], std::move(values[i]));
    }
  }

  // Renders prompts for one batch and resolves each through the cache.
  // Returns one optional per row: nullopt marks the all-null prompt.
  std::vector<std::optional<Value>> semantic_eval_batch(const std::vector<Row*>& batch,
                                                        const SemanticPredicate& predicate,
                                                        const std::vector<int>& column_indexes, NodeId node_id) {
    std::vector<std::optional<Value>> out(batch.size());
    std::vector<std::string> rendered(batch.size());
    std::vector<bool> has_prompt(batch.size(), false);
    std::vector<std::string> pending;
    std::unordered_set<std::string> pending_set;
    std::unordered_map<std::string, Value> resolved;
    for (size_t i = 0; i < batch.size(); ++i) {
      auto prompt = render_prompt(predicate, *batch[i], column_indexes);
      if (!prompt) continue;
      rendered[i] = std::move(*prompt);
      has_prompt[i] = true;
      if (auto cached = cache_.try_get(rendered[i])) {
        resolved[rendered[i]] = std::move(*cached);
      } else if (pending_set.insert(rendered[i]).second) {
        pending.push_back(rendered[i]);
      } else {
        cache_.record_pending_hit();
      }
    }
    evaluate_prompts(pending, predicate, node_id, resolved);
    for (size_t i = 0; i < batch.size(); ++i) {
      if (has_prompt[i]) out[i] = resolved.at(rendered[i]);
    }
    return out;
  }

  Relation eval_sem_filter(const PlanNode& node) {
    Relation input = eval(node.children[0]);
    const auto& predicate = std::get<SemFilterPayload>(node.payload).predicate;
    std::vector<int> column_indexes;
    for (const auto& ref : predicate.referenced_columns) {
      int idx = input.column_index(ref);
      if (idx < 0) throw SemqlError(ErrorKind::Execute, "semantic filter column " + ref.to_string() + " not found");
      column_indexes.push_back(idx);
    }
    Relation out;
    out.schema = input.schema;
    for (size_t begin = 0; begin < input.rows.size(); begin += options_.batch_size) {
      size_t end = std::min(begin + options_.batch_size, input.rows.size());
      std::vector<Row*> batch;
      batch.reserve(end - begin);
      for (size_t i = begin; i < end; ++i) batch.push_back(&input.rows[i]);
      auto values = semantic_eval_batch(batch, predicate, column_indexes, node.id);
      for (size_t i = 0; i < batch.size(); ++i) {
        // rows with an all-null projection produce a NULL outcome: not true,
        // so the row is excluded without any oracle call
        if (!values[i]) continue;
        if (std::holds_alternative<bool>(*values[i]) && std::get<bool>(*values[i])) {
          out.rows.push_back(std::move(*batch[i]));
        }
      }
    }
    return out;
  }

  Relation eval_sem_project(const PlanNode& node) {
    Relation input = eval(node.children[0]);
    const auto& payload = std::get<SemProjectPayload>(node.payload);
    const auto& predicate = payload.predicate;
    std::vector<int> column_indexes;
    for (const auto& ref : predicate.referenced_columns) {
      int idx = input.column_index(ref);
      if (idx < 0) throw SemqlError(ErrorKind::Execute, "semantic projection column " + ref.to_string() + " not found");
      column_indexes.push_back(idx);
    }
    Relation out;
    out.schema = input.schema;
    out.schema.push_back({"", payload.output_name, predicate.output_type});
    for (size_t begin = 0; begin < input.rows.size(); begin += options_.batch_size) {
      size_t end = std::min(begin + options_.batch_size, input.rows.size());
      std::vector<Row*> batch;
      batch.reserve(end - begin);
      for (size_t i = begin; i < end; ++i) batch.push_back(&input.rows[i]);
      auto values = semantic_eval_batch(batch, predicate, column_indexes, node.id);
      for (size_t i = 0; i < batch.size(); ++i) {
        Row row = std::move(*batch[i]);
        if (!values[i]) {
          row.push_back(std::monostate{});
        } else {
          row.push_back(coerce_output(*values[i], predicate.output_type));
        }
        out.rows.push_back(std::move(row));
      }
    }
    return out;
  }

  Value coerce_output(const Value& v, ColumnType type) {
    if (is_null(v)) return v;
    switch (type) {
      case ColumnType::Integer: {
        if (std::holds_alternative<int64_t>(v)) return v;
        if (const auto* s = std::get_if<std::string>(&v)) {
          // strict digits-only rule; parse failure maps to NULL plus a warning
          if (!s->empty() && s->find_first_not_of("0123456789") == std::string::npos) {
            return static_cast<int64_t>(std::stoll(*s));
          }
          metrics_.sp_parse_warnings++;
          return std::monostate{};
        }
        metrics_.sp_parse_warnings++;
        return std::monostate{};
      }
      case ColumnType::Text:
        return std::holds_alternative<std::string>(v) ? v : Value{canonical_text(v)};
      default:
        return v;
    }
  }

  const PlanTree& tree_;
  const Dataset& data_;
  SemanticOracle& oracle_;
  FunctionCache& cache_;
  ExecOptions options_;
  ExecutionMetrics metrics_;
};

}  // namespace

std::optional<std::string> render_prompt(const SemanticPredicate& predicate, const Row& row,
                                         const std::vector<int>& column_indexes) {
  bool all_null = true;
  for (int idx : column_indexes) {
    if (!is_null(row[idx])) {
      all_null = false;
      break;
    }
  }
  if (all_null) return std::nullopt;
  auto segments = compile_template(predicate, column_indexes);
  std::string out;
  for (const auto& seg : segments) {
    out += seg.literal;
    if (seg.column_index >= 0) out += canonical_text(row[seg.column_index]);
  }
  return out;
}

ExecResult execute(const PlanTree& tree, const Dataset& data, SemanticOracle& oracle, FunctionCache& cache,
                   const ExecOptions& options) {
  Executor executor(tree, data, oracle, cache, options);
  return executor.run();
}

uint64_t count_distinct_inputs(const PlanTree& tree, NodeId filter_node, NodeId at, const Dataset& data,
                               SemanticOracle& oracle) {
  const PlanNode& filter = tree.node(filter_node);
  if (filter.kind != NodeKind::SemFilter) {
    throw SemqlError(ErrorKind::Execute, "count_distinct_inputs expects a SemFilter node");
  }
  const auto& predicate = std::get<SemFilterPayload>(filter.payload).predicate;

  PlanTree working = tree;
  // splice the filter itself out so its own selectivity does not thin the
  // measured intermediate result
  NodeId at_node = at;
  if (at_node == filter_node) at_node = filter.children[0];
  detach_unary(working, filter_node);
  working.nodes.erase(filter_node);
  if (!working.has_node(at_node)) throw SemqlError(ErrorKind::Execute, "unknown measurement node");

  // measurement is undefined across block operators
  NodeId former_child = filter.children[0];
  if (former_child != at_node && working.subtree(at_node).count(former_child)) {
    auto parents = working.parent_map();
    NodeId cur = former_child;
    while (cur != at_node) {
      cur = parents.at(cur);
      if (is_block_operator(working.node(cur).kind)) {
        throw SemqlError(ErrorKind::Execute, "measurement position crosses a block operator");
      }
    }
  }

  PlanTree subtree;
  subtree.catalog = working.catalog;
  subtree.root = at_node;
  for (NodeId id : working.subtree(at_node)) subtree.nodes[id] = working.node(id);

  FunctionCache cache;
  ExecResult result = execute(subtree, data, oracle, cache);

  std::vector<int> column_indexes;
  for (const auto& ref : predicate.referenced_columns) {
    int idx = result.output.column_index(ref);
    if (idx < 0) {
      throw SemqlError(ErrorKind::Execute, "column " + ref.to_string() + " unavailable at measurement node");
    }
    column_indexes.push_back(idx);
  }
  std::set<std::string> distinct;
  for (const auto& row : result.output.rows) {
    auto prompt = render_prompt(predicate, row, column_indexes);
    if (prompt) distinct.insert(*prompt);
  }
  return distinct.size();
}

}  // namespace semql
