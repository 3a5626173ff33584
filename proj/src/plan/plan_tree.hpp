#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "plan/value.hpp"

namespace semql {

using NodeId = uint32_t;

// Reference to a column. `table` names a base table; an empty table marks a
// derived column produced by a SemProject node.
struct ColumnRef {
  std::string table;
  std::string column;

  bool operator==(const ColumnRef& other) const = default;
  auto operator<=>(const ColumnRef& other) const = default;

  std::string to_string() const { return table.empty() ? column : table + "." + column; }
};

// Natural-language predicate or transform template. Placeholders have the
// form {table.column} (or {column} for derived columns) and must match
// referenced_columns one to one.
struct SemanticPredicate {
  std::string template_text;
  std::vector<ColumnRef> referenced_columns;
  ColumnType output_type = ColumnType::Boolean;

  std::set<std::string> referenced_tables() const;
  bool operator==(const SemanticPredicate& other) const = default;
};

// Placeholder tokens appearing in a template, in order of first occurrence.
std::vector<std::string> template_placeholders(const std::string& template_text);

enum class NodeKind {
  TableScan,
  RelFilter,
  Project,
  InnerJoin,
  CrossJoin,
  Aggregate,
  Limit,
  Union,
  Sort,
  SemFilter,
  SemProject,
};

std::string node_kind_name(NodeKind kind);
std::optional<NodeKind> node_kind_from_name(const std::string& name);

// True for operators a semantic filter must not cross: they change
// multiplicity, grouping, or row selection order.
bool is_block_operator(NodeKind kind);

enum class CompareOp { Equal, NotEqual, Less, LessEqual, Greater, GreaterEqual, Between, InList, IsNull, IsNotNull };

std::string compare_op_name(CompareOp op);
std::optional<CompareOp> compare_op_from_name(const std::string& name);

// One comparison: column op constants, or column op column.
struct Comparison {
  ColumnRef column;
  CompareOp op = CompareOp::Equal;
  std::vector<Value> operands;
  std::optional<ColumnRef> rhs_column;

  std::vector<ColumnRef> referenced_columns() const;
};

struct TableScanPayload {
  std::string table;
};

struct RelFilterPayload {
  std::vector<Comparison> conjuncts;
};

struct ProjectPayload {
  std::vector<ColumnRef> columns;
};

struct InnerJoinPayload {
  std::vector<std::pair<ColumnRef, ColumnRef>> keys;  // (left side, right side)
};

struct CrossJoinPayload {
  bool from_join_decomposition = false;
};

enum class AggregateOp { CountStar, Count, Sum, Min, Max };

struct AggregateExpr {
  AggregateOp op = AggregateOp::CountStar;
  std::optional<ColumnRef> column;
  std::string output_name;
};

struct AggregatePayload {
  std::vector<ColumnRef> group_by;
  std::vector<AggregateExpr> aggregates;
};

struct LimitPayload {
  uint64_t count = 0;
};

struct UnionPayload {};

struct SortKey {
  ColumnRef column;
  bool descending = false;
};

struct SortPayload {
  std::vector<SortKey> keys;
};

struct SemFilterPayload {
  SemanticPredicate predicate;
  std::optional<double> selectivity;
};

struct SemProjectPayload {
  SemanticPredicate predicate;
  std::string output_name;
};

using NodePayload = std::variant<TableScanPayload, RelFilterPayload, ProjectPayload, InnerJoinPayload,
                                 CrossJoinPayload, AggregatePayload, LimitPayload, UnionPayload, SortPayload,
                                 SemFilterPayload, SemProjectPayload>;

struct PlanNode {
  NodeId id = 0;
  NodeKind kind = NodeKind::TableScan;
  NodePayload payload;
  std::vector<NodeId> children;

  std::vector<ColumnRef> referenced_columns() const;
};

struct TableSchema {
  std::vector<std::pair<std::string, ColumnType>> columns;
  std::optional<uint64_t> row_count;

  std::optional<ColumnType> column_type(const std::string& name) const;
};

struct Catalog {
  std::map<std::string, TableSchema> tables;

  bool has_table(const std::string& name) const { return tables.count(name) > 0; }
};

struct OutputColumn {
  std::string table;  // empty for derived columns
  std::string name;
  ColumnType type = ColumnType::Text;

  ColumnRef ref() const { return ColumnRef{table, name}; }
  bool operator==(const OutputColumn& other) const = default;
};

struct Violation {
  NodeId node = 0;
  std::string message;
};

// Operator tree. Node ids are stable: rewrites move nodes, never renumber.
struct PlanTree {
  NodeId root = 0;
  std::map<NodeId, PlanNode> nodes;
  Catalog catalog;

  const PlanNode& node(NodeId id) const;
  PlanNode& node(NodeId id);
  bool has_node(NodeId id) const { return nodes.count(id) > 0; }

  NodeId add_node(NodeKind kind, NodePayload payload, std::vector<NodeId> children);
  NodeId next_id() const;

  // parent of each non-root node, rebuilt on demand
  std::map<NodeId, NodeId> parent_map() const;

  std::vector<NodeId> postorder() const;
  std::set<NodeId> subtree(NodeId id) const;
};

std::vector<Violation> validate(const PlanTree& tree);

std::set<std::string> tables_under(const PlanTree& tree, NodeId id);

// Output schema of the intermediate result produced at `id`.
std::vector<OutputColumn> output_schema(const PlanTree& tree, NodeId id);

// Splices a unary node out of the tree: its child takes its place.
void detach_unary(PlanTree& tree, NodeId id);

// Re-inserts a detached unary node directly above `target`.
void insert_above(PlanTree& tree, NodeId node, NodeId target);

// Swaps a unary node with its (unary or binary) parent, moving it one level up.
void swap_with_parent(PlanTree& tree, NodeId id);

// Structural equality up to node ids (kinds, payloads, child shapes).
// The cross-join decomposition marker is ignored.
bool isomorphic(const PlanTree& a, const PlanTree& b);

// Ensures every non-root Project passes through the columns that operators
// above it reference, where its subtree can produce them.
void repair_projections(PlanTree& tree);

}  // namespace semql
