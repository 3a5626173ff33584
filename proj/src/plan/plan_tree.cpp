#include "plan/plan_tree.hpp"

#include <algorithm>
#include <functional>

#include "common/error.hpp"

namespace semql {

std::set<std::string> SemanticPredicate::referenced_tables() const {
  std::set<std::string> out;
  for (const auto& c : referenced_columns) {
    if (!c.table.empty()) out.insert(c.table);
  }
  return out;
}

std::vector<std::string> template_placeholders(const std::string& template_text) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos < template_text.size()) {
    size_t open = template_text.find('{', pos);
    if (open == std::string::npos) break;
    size_t close = template_text.find('}', open + 1);
    if (close == std::string::npos) break;
    std::string token = template_text.substr(open + 1, close - open - 1);
    if (std::find(out.begin(), out.end(), token) == out.end()) out.push_back(token);
    pos = close + 1;
  }
  return out;
}

std::string node_kind_name(NodeKind kind) {
  switch (kind) {
    case NodeKind::TableScan:
      return "TableScan";
    case NodeKind::RelFilter:
      return "RelFilter";
    case NodeKind::Project:
      return "Project";
    case NodeKind::InnerJoin:
      return "InnerJoin";
    case NodeKind::CrossJoin:
      return "CrossJoin";
    case NodeKind::Aggregate:
      return "Aggregate";
    case NodeKind::Limit:
      return "Limit";
    case NodeKind::Union:
      return "Union";
    case NodeKind::Sort:
      return "Sort";
    case NodeKind::SemFilter:
      return "SemFilter";
    case NodeKind::SemProject:
      return "SemProject";
  }
  return "TableScan";
}

std::optional<NodeKind> node_kind_from_name(const std::string& name) {
  static const std::map<std::string, NodeKind> kinds = {
      {"TableScan", NodeKind::TableScan}, {"RelFilter", NodeKind::RelFilter},
      {"Project", NodeKind::Project},     {"InnerJoin", NodeKind::InnerJoin},
      {"CrossJoin", NodeKind::CrossJoin}, {"Aggregate", NodeKind::Aggregate},
      {"Limit", NodeKind::Limit},         {"Union", NodeKind::Union},
      {"Sort", NodeKind::Sort},           {"SemFilter", NodeKind::SemFilter},
      {"SemProject", NodeKind::SemProject}};
  auto it = kinds.find(name);
  if (it == kinds.end()) return std::nullopt;
  return it->second;
}

bool is_block_operator(NodeKind kind) {
  switch (kind) {
    case NodeKind::Limit:
    case NodeKind::Union:
    case NodeKind::Aggregate:
    case NodeKind::Sort:
      return true;
    default:
      return false;
  }
}

std::string compare_op_name(CompareOp op) {
  switch (op) {
    case CompareOp::Equal:
      return "=";
    case CompareOp::NotEqual:
      return "<>";
    case CompareOp::Less:
      return "<";
    case CompareOp::LessEqual:
      return "<=";
    case CompareOp::Greater:
      return ">";
    case CompareOp::GreaterEqual:
      return ">=";
    case CompareOp::Between:
      return "between";
    case CompareOp::InList:
      return "in";
    case CompareOp::IsNull:
      return "is_null";
    case CompareOp::IsNotNull:
      return "is_not_null";
  }
  return "=";
}

std::optional<CompareOp> compare_op_from_name(const std::string& name) {
  static const std::map<std::string, CompareOp> ops = {
      {"=", CompareOp::Equal},       {"<>", CompareOp::NotEqual},     {"!=", CompareOp::NotEqual},
      {"<", CompareOp::Less},        {"<=", CompareOp::LessEqual},    {">", CompareOp::Greater},
      {">=", CompareOp::GreaterEqual}, {"between", CompareOp::Between}, {"in", CompareOp::InList},
      {"is_null", CompareOp::IsNull}, {"is_not_null", CompareOp::IsNotNull}};
  auto it = ops.find(name);
  if (it == ops.end()) return std::nullopt;
  return it->second;
}

std::vector<ColumnRef> Comparison::referenced_columns() const {
  std::vector<ColumnRef> out{column};
  if (rhs_column) out.push_back(*rhs_column);
  return out;
}

std::vector<ColumnRef> PlanNode::referenced_columns() const {
  std::vector<ColumnRef> out;
  auto add = [&out](const ColumnRef& c) {
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  };
  if (const auto* f = std::get_if<RelFilterPayload>(&payload)) {
    for (const auto& cmp : f->conjuncts) {
      for (const auto& c : cmp.referenced_columns()) add(c);
    }
  } else if (const auto* p = std::get_if<ProjectPayload>(&payload)) {
    for (const auto& c : p->columns) add(c);
  } else if (const auto* j = std::get_if<InnerJoinPayload>(&payload)) {
    for (const auto& [l, r] : j->keys) {
      add(l);
      add(r);
    }
  } else if (const auto* a = std::get_if<AggregatePayload>(&payload)) {
    for (const auto& c : a->group_by) add(c);
    for (const auto& agg : a->aggregates) {
      if (agg.column) add(*agg.column);
    }
  } else if (const auto* s = std::get_if<SortPayload>(&payload)) {
    for (const auto& k : s->keys) add(k.column);
  } else if (const auto* sf = std::get_if<SemFilterPayload>(&payload)) {
    for (const auto& c : sf->predicate.referenced_columns) add(c);
  } else if (const auto* sp = std::get_if<SemProjectPayload>(&payload)) {
    for (const auto& c : sp->predicate.referenced_columns) add(c);
  }
  return out;
}

std::optional<ColumnType> TableSchema::column_type(const std::string& name) const {
  for (const auto& [col, type] : columns) {
    if (col == name) return type;
  }
  return std::nullopt;
}

const PlanNode& PlanTree::node(NodeId id) const {
  auto it = nodes.find(id);
  if (it == nodes.end()) throw SemqlError(ErrorKind::Internal, "unknown node id " + std::to_string(id));
  return it->second;
}

PlanNode& PlanTree::node(NodeId id) {
  auto it = nodes.find(id);
  if (it == nodes.end()) throw SemqlError(ErrorKind::Internal, "unknown node id " + std::to_string(id));
  return it->second;
}

NodeId PlanTree::next_id() const {
  return nodes.empty() ? 1 : nodes.rbegin()->first + 1;
}

NodeId PlanTree::add_node(NodeKind kind, NodePayload payload, std::vector<NodeId> children) {
  NodeId id = next_id();
  nodes[id] = PlanNode{id, kind, std::move(payload), std::move(children)};
  return id;
}

std::map<NodeId, NodeId> PlanTree::parent_map() const {
  std::map<NodeId, NodeId> parents;
  for (const auto& [id, node] : nodes) {
    for (NodeId child : node.children) parents[child] = id;
  }
  return parents;
}

std::vector<NodeId> PlanTree::postorder() const {
  std::vector<NodeId> out;
  std::function<void(NodeId)> walk = [&](NodeId id) {
    for (NodeId child : node(id).children) walk(child);
    out.push_back(id);
  };
  walk(root);
  return out;
}

std::set<NodeId> PlanTree::subtree(NodeId id) const {
  std::set<NodeId> out;
  std::function<void(NodeId)> walk = [&](NodeId cur) {
    out.insert(cur);
    for (NodeId child : node(cur).children) walk(child);
  };
  walk(id);
  return out;
}

namespace {

size_t expected_arity(NodeKind kind) {
  switch (kind) {
    case NodeKind::TableScan:
      return 0;
    case NodeKind::InnerJoin:
    case NodeKind::CrossJoin:
    case NodeKind::Union:
      return 2;
    default:
      return 1;
  }
}

bool schema_has(const std::vector<OutputColumn>& schema, const ColumnRef& ref) {
  for (const auto& col : schema) {
    if (col.table == ref.table && col.name == ref.column) return true;
  }
  return false;
}

}  // namespace

std::vector<OutputColumn> output_schema(const PlanTree& tree, NodeId id) {
  const PlanNode& node = tree.node(id);
  switch (node.kind) {
    case NodeKind::TableScan: {
      const auto& payload = std::get<TableScanPayload>(node.payload);
      auto it = tree.catalog.tables.find(payload.table);
      if (it == tree.catalog.tables.end()) {
        throw SemqlError(ErrorKind::Bind, "unknown table '" + payload.table + "'");
      }
      std::vector<OutputColumn> out;
      for (const auto& [name, type] : it->second.columns) out.push_back({payload.table, name, type});
      return out;
    }
    case NodeKind::Project: {
      auto child = output_schema(tree, node.children[0]);
      const auto& payload = std::get<ProjectPayload>(node.payload);
      std::vector<OutputColumn> out;
      for (const auto& ref : payload.columns) {
        bool found = false;
        for (const auto& col : child) {
          if (col.table == ref.table && col.name == ref.column) {
            out.push_back(col);
            found = true;
            break;
          }
        }
        if (!found) out.push_back({ref.table, ref.column, ColumnType::Text});
      }
      return out;
    }
    case NodeKind::InnerJoin:
    case NodeKind::CrossJoin: {
      auto out = output_schema(tree, node.children[0]);
      auto right = output_schema(tree, node.children[1]);
      out.insert(out.end(), right.begin(), right.end());
      return out;
    }
    case NodeKind::Union:
      return output_schema(tree, node.children[0]);
    case NodeKind::Aggregate: {
      auto child = output_schema(tree, node.children[0]);
      const auto& payload = std::get<AggregatePayload>(node.payload);
      std::vector<OutputColumn> out;
      for (const auto& g : payload.group_by) {
        for (const auto& col : child) {
          if (col.table == g.table && col.name == g.column) {
            out.push_back(col);
            break;
          }
        }
      }
      for (const auto& agg : payload.aggregates) {
        ColumnType type = ColumnType::Integer;
        if (agg.op == AggregateOp::Sum || agg.op == AggregateOp::Min || agg.op == AggregateOp::Max) {
          if (agg.column) {
            for (const auto& col : child) {
              if (col.table == agg.column->table && col.name == agg.column->column) type = col.type;
            }
          }
        }
        out.push_back({"", agg.output_name, type});
      }
      return out;
    }
    case NodeKind::SemProject: {
      auto out = output_schema(tree, node.children[0]);
      const auto& payload = std::get<SemProjectPayload>(node.payload);
      out.push_back({"", payload.output_name, payload.predicate.output_type});
      return out;
    }
    default:
      return output_schema(tree, node.children[0]);
  }
}

std::set<std::string> tables_under(const PlanTree& tree, NodeId id) {
  const PlanNode& node = tree.node(id);
  std::set<std::string> out;
  if (node.kind == NodeKind::TableScan) {
    out.insert(std::get<TableScanPayload>(node.payload).table);
    return out;
  }
  for (NodeId child : node.children) {
    auto sub = tables_under(tree, child);
    out.insert(sub.begin(), sub.end());
  }
  return out;
}

std::vector<Violation> validate(const PlanTree& tree) {
  std::vector<Violation> out;
  if (!tree.has_node(tree.root)) {
    out.push_back({tree.root, "root node does not exist"});
    return out;
  }

  // arity, child existence, single-parent, acyclicity
  std::map<NodeId, int> parent_count;
  for (const auto& [id, node] : tree.nodes) {
    size_t arity = expected_arity(node.kind);
    if (node.children.size() != arity) {
      out.push_back({id, node_kind_name(node.kind) + " has " + std::to_string(node.children.size()) +
                             " children, expected " + std::to_string(arity)});
    }
    for (NodeId child : node.children) {
      if (!tree.has_node(child)) {
        out.push_back({id, "child " + std::to_string(child) + " does not exist"});
      } else {
        parent_count[child]++;
      }
    }
  }
  for (const auto& [id, count] : parent_count) {
    if (count > 1) out.push_back({id, "node has " + std::to_string(count) + " parents"});
    if (id == tree.root) out.push_back({id, "root has a parent"});
  }
  if (!out.empty()) return out;

  std::set<NodeId> reachable;
  std::function<bool(NodeId)> walk = [&](NodeId id) {
    if (reachable.count(id)) {
      out.push_back({id, "cycle detected"});
      return false;
    }
    reachable.insert(id);
    for (NodeId child : tree.node(id).children) {
      if (!walk(child)) return false;
    }
    return true;
  };
  if (!walk(tree.root)) return out;
  for (const auto& [id, node] : tree.nodes) {
    if (!reachable.count(id)) out.push_back({id, "node unreachable from root"});
  }
  if (!out.empty()) return out;

  // payload checks
  for (const auto& [id, node] : tree.nodes) {
    if (node.kind == NodeKind::TableScan) {
      const auto& table = std::get<TableScanPayload>(node.payload).table;
      if (!tree.catalog.has_table(table)) out.push_back({id, "table '" + table + "' not in catalog"});
      continue;
    }
    std::vector<OutputColumn> child_schema;
    if (node.kind == NodeKind::InnerJoin || node.kind == NodeKind::CrossJoin || node.kind == NodeKind::Union) {
      child_schema = output_schema(tree, node.children[0]);
      auto right = output_schema(tree, node.children[1]);
      if (node.kind == NodeKind::Union) {
        if (child_schema.size() != right.size()) out.push_back({id, "union children have mismatched arity"});
      } else {
        child_schema.insert(child_schema.end(), right.begin(), right.end());
      }
    } else {
      child_schema = output_schema(tree, node.children[0]);
    }
    if (node.kind == NodeKind::InnerJoin) {
      const auto& keys = std::get<InnerJoinPayload>(node.payload).keys;
      auto left_schema = output_schema(tree, node.children[0]);
      auto right_schema = output_schema(tree, node.children[1]);
      for (const auto& [l, r] : keys) {
        if (!schema_has(left_schema, l)) out.push_back({id, "join key " + l.to_string() + " not in left input"});
        if (!schema_has(right_schema, r)) out.push_back({id, "join key " + r.to_string() + " not in right input"});
      }
      continue;
    }
    for (const auto& ref : node.referenced_columns()) {
      if (!schema_has(child_schema, ref)) {
        out.push_back({id, "column " + ref.to_string() + " not producible by subtree"});
      }
    }
    if (const auto* sf = std::get_if<SemFilterPayload>(&node.payload)) {
      if (sf->predicate.output_type != ColumnType::Boolean) {
        out.push_back({id, "semantic filter predicate must be boolean"});
      }
    }
    if (const auto* sf = std::get_if<SemFilterPayload>(&node.payload)) {
      auto placeholders = template_placeholders(sf->predicate.template_text);
      if (placeholders.size() != sf->predicate.referenced_columns.size()) {
        out.push_back({id, "template placeholders do not match referenced columns"});
      }
    }
    if (const auto* sp = std::get_if<SemProjectPayload>(&node.payload)) {
      auto placeholders = template_placeholders(sp->predicate.template_text);
      if (placeholders.size() != sp->predicate.referenced_columns.size()) {
        out.push_back({id, "template placeholders do not match referenced columns"});
      }
    }
  }
  return out;
}

void detach_unary(PlanTree& tree, NodeId id) {
  PlanNode& node = tree.node(id);
  if (node.children.size() != 1) throw SemqlError(ErrorKind::Internal, "detach_unary on non-unary node");
  NodeId child = node.children[0];
  if (tree.root == id) {
    tree.root = child;
  } else {
    auto parents = tree.parent_map();
    PlanNode& parent = tree.node(parents.at(id));
    for (NodeId& c : parent.children) {
      if (c == id) c = child;
    }
  }
  node.children.clear();
}

void insert_above(PlanTree& tree, NodeId node_id, NodeId target) {
  PlanNode& node = tree.node(node_id);
  if (!node.children.empty()) throw SemqlError(ErrorKind::Internal, "insert_above on attached node");
  if (tree.root == target) {
    tree.root = node_id;
  } else {
    auto parents = tree.parent_map();
    PlanNode& parent = tree.node(parents.at(target));
    for (NodeId& c : parent.children) {
      if (c == target) c = node_id;
    }
  }
  node.children = {target};
}

void swap_with_parent(PlanTree& tree, NodeId id) {
  auto parents = tree.parent_map();
  auto it = parents.find(id);
  if (it == parents.end()) throw SemqlError(ErrorKind::Internal, "swap_with_parent on root");
  NodeId parent_id = it->second;
  PlanNode& node = tree.node(id);
  PlanNode& parent = tree.node(parent_id);
  if (node.children.size() != 1) throw SemqlError(ErrorKind::Internal, "swap_with_parent on non-unary node");
  NodeId child = node.children[0];

  if (tree.root == parent_id) {
    tree.root = id;
  } else {
    PlanNode& grandparent = tree.node(parents.at(parent_id));
    for (NodeId& c : grandparent.children) {
      if (c == parent_id) c = id;
    }
  }
  for (NodeId& c : parent.children) {
    if (c == id) c = child;
  }
  node.children = {parent_id};
}

namespace {

// a keyless inner join is structurally a cross product
NodeKind normalized_kind(const PlanNode& node) {
  if (node.kind == NodeKind::InnerJoin && std::get<InnerJoinPayload>(node.payload).keys.empty()) {
    return NodeKind::CrossJoin;
  }
  return node.kind;
}

bool payload_equal(const PlanNode& a, const PlanNode& b) {
  if (normalized_kind(a) != normalized_kind(b)) return false;
  if (a.kind != b.kind) return true;  // keyless join vs cross join: no payload to compare
  switch (a.kind) {
    case NodeKind::TableScan:
      return std::get<TableScanPayload>(a.payload).table == std::get<TableScanPayload>(b.payload).table;
    case NodeKind::RelFilter: {
      const auto& fa = std::get<RelFilterPayload>(a.payload).conjuncts;
      const auto& fb = std::get<RelFilterPayload>(b.payload).conjuncts;
      if (fa.size() != fb.size()) return false;
      for (size_t i = 0; i < fa.size(); ++i) {
        if (fa[i].column != fb[i].column || fa[i].op != fb[i].op || fa[i].rhs_column != fb[i].rhs_column) return false;
        if (fa[i].operands.size() != fb[i].operands.size()) return false;
        for (size_t j = 0; j < fa[i].operands.size(); ++j) {
          if (!value_equal(fa[i].operands[j], fb[i].operands[j]) &&
              !(is_null(fa[i].operands[j]) && is_null(fb[i].operands[j])))
            return false;
        }
      }
      return true;
    }
    case NodeKind::Project:
      return std::get<ProjectPayload>(a.payload).columns == std::get<ProjectPayload>(b.payload).columns;
    case NodeKind::InnerJoin:
      return std::get<InnerJoinPayload>(a.payload).keys == std::get<InnerJoinPayload>(b.payload).keys;
    case NodeKind::CrossJoin:
      return true;  // decomposition marker ignored
    case NodeKind::Limit:
      return std::get<LimitPayload>(a.payload).count == std::get<LimitPayload>(b.payload).count;
    case NodeKind::Union:
      return true;
    case NodeKind::Sort: {
      const auto& sa = std::get<SortPayload>(a.payload).keys;
      const auto& sb = std::get<SortPayload>(b.payload).keys;
      if (sa.size() != sb.size()) return false;
      for (size_t i = 0; i < sa.size(); ++i) {
        if (sa[i].column != sb[i].column || sa[i].descending != sb[i].descending) return false;
      }
      return true;
    }
    case NodeKind::Aggregate: {
      const auto& aa = std::get<AggregatePayload>(a.payload);
      const auto& ab = std::get<AggregatePayload>(b.payload);
      if (aa.group_by != ab.group_by || aa.aggregates.size() != ab.aggregates.size()) return false;
      for (size_t i = 0; i < aa.aggregates.size(); ++i) {
        if (aa.aggregates[i].op != ab.aggregates[i].op || aa.aggregates[i].column != ab.aggregates[i].column ||
            aa.aggregates[i].output_name != ab.aggregates[i].output_name)
          return false;
      }
      return true;
    }
    case NodeKind::SemFilter:
      return std::get<SemFilterPayload>(a.payload).predicate == std::get<SemFilterPayload>(b.payload).predicate;
    case NodeKind::SemProject: {
      const auto& pa = std::get<SemProjectPayload>(a.payload);
      const auto& pb = std::get<SemProjectPayload>(b.payload);
      return pa.predicate == pb.predicate && pa.output_name == pb.output_name;
    }
  }
  return false;
}

}  // namespace

bool isomorphic(const PlanTree& a, const PlanTree& b) {
  std::function<bool(NodeId, NodeId)> walk = [&](NodeId na, NodeId nb) {
    const PlanNode& x = a.node(na);
    const PlanNode& y = b.node(nb);
    if (!payload_equal(x, y)) return false;
    if (x.children.size() != y.children.size()) return false;
    for (size_t i = 0; i < x.children.size(); ++i) {
      if (!walk(x.children[i], y.children[i])) return false;
    }
    return true;
  };
  return walk(a.root, b.root);
}

void repair_projections(PlanTree& tree) {
  auto parents = tree.parent_map();
  // required columns above each node, accumulated root-down
  std::map<NodeId, std::vector<ColumnRef>> required;
  std::function<void(NodeId, std::vector<ColumnRef>)> walk = [&](NodeId id, std::vector<ColumnRef> needed) {
    PlanNode& node = tree.node(id);
    for (const auto& ref : node.referenced_columns()) {
      if (std::find(needed.begin(), needed.end(), ref) == needed.end()) needed.push_back(ref);
    }
    if (node.kind == NodeKind::Project && id != tree.root) {
      auto& cols = std::get<ProjectPayload>(node.payload).columns;
      auto child_schema = output_schema(tree, node.children[0]);
      for (const auto& ref : needed) {
        if (std::find(cols.begin(), cols.end(), ref) == cols.end() && schema_has(child_schema, ref)) {
          cols.push_back(ref);
        }
      }
    }
    for (NodeId child : node.children) walk(child, needed);
  };
  walk(tree.root, {});
}

}  // namespace semql
