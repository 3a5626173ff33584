#include "sql/render_sql.hpp"

#include <algorithm>

#include "common/error.hpp"

namespace semql {

namespace {

std::string quote_string(const std::string& text) {
  std::string out = "'";
  for (char c : text) {
    if (c == '\'') out += "''";
    out.push_back(c);
  }
  out += "'";
  return out;
}

std::string render_value(const Value& v) {
  if (is_null(v)) return "NULL";
  if (const auto* s = std::get_if<std::string>(&v)) return quote_string(*s);
  return canonical_text(v);
}

std::string render_column(const ColumnRef& ref) { return ref.table.empty() ? ref.column : ref.to_string(); }

struct RenderState {
  const PlanTree& tree;
  std::vector<std::string> where;               // conjuncts, bottom-up
  std::vector<const SemProjectPayload*> projections;
  std::string from_clause;
  bool first_source = true;
};

std::string render_comparison(const Comparison& cmp) {
  std::string lhs = render_column(cmp.column);
  switch (cmp.op) {
    case CompareOp::Between:
      return lhs + " BETWEEN " + render_value(cmp.operands[0]) + " AND " + render_value(cmp.operands[1]);
    case CompareOp::InList: {
      std::string out = lhs + " IN (";
      for (size_t i = 0; i < cmp.operands.size(); ++i) {
        if (i > 0) out += ", ";
        out += render_value(cmp.operands[i]);
      }
      return out + ")";
    }
    case CompareOp::IsNull:
      return lhs + " IS NULL";
    case CompareOp::IsNotNull:
      return lhs + " IS NOT NULL";
    default:
      break;
  }
  std::string rhs = cmp.rhs_column ? render_column(*cmp.rhs_column) : render_value(cmp.operands[0]);
  std::string op = compare_op_name(cmp.op);
  return lhs + " " + op + " " + rhs;
}

// Collects a join input branch: unary wrappers fold into WHERE and the
// SELECT list, the branch must bottom out at a single table scan.
std::string render_branch(RenderState& state, NodeId id) {
  const PlanNode& node = state.tree.node(id);
  switch (node.kind) {
    case NodeKind::TableScan:
      return std::get<TableScanPayload>(node.payload).table;
    case NodeKind::RelFilter: {
      std::string table = render_branch(state, node.children[0]);
      for (const auto& cmp : std::get<RelFilterPayload>(node.payload).conjuncts) {
        state.where.push_back(render_comparison(cmp));
      }
      return table;
    }
    case NodeKind::SemFilter: {
      std::string table = render_branch(state, node.children[0]);
      const auto& pred = std::get<SemFilterPayload>(node.payload).predicate;
      state.where.push_back("SEMANTIC(" + quote_string(pred.template_text) + ")");
      return table;
    }
    case NodeKind::SemProject: {
      std::string table = render_branch(state, node.children[0]);
      state.projections.push_back(&std::get<SemProjectPayload>(node.payload));
      return table;
    }
    case NodeKind::Project:
      // intermediate projection (column pruning only); folded away
      return render_branch(state, node.children[0]);
    default:
      throw SemqlError(ErrorKind::Optimize,
                       node_kind_name(node.kind) + " inside a join input has no surface syntax");
  }
}

// Walks the operator tree below the output projection, folding filters into
// WHERE and joins into FROM.
void render_source(RenderState& state, NodeId id) {
  const PlanNode& node = state.tree.node(id);
  switch (node.kind) {
    case NodeKind::InnerJoin: {
      render_source(state, node.children[0]);
      std::string table = render_branch(state, node.children[1]);
      const auto& keys = std::get<InnerJoinPayload>(node.payload).keys;
      if (keys.empty()) {
        // the semantic-join shape: a keyless inner join is a cross product
        state.from_clause += " CROSS JOIN " + table;
        return;
      }
      std::string on;
      for (size_t i = 0; i < keys.size(); ++i) {
        if (i > 0) on += " AND ";
        on += render_column(keys[i].first) + " = " + render_column(keys[i].second);
      }
      state.from_clause += " JOIN " + table + " ON " + on;
      return;
    }
    case NodeKind::CrossJoin: {
      render_source(state, node.children[0]);
      state.from_clause += " CROSS JOIN " + render_branch(state, node.children[1]);
      return;
    }
    case NodeKind::RelFilter: {
      render_source(state, node.children[0]);
      for (const auto& cmp : std::get<RelFilterPayload>(node.payload).conjuncts) {
        state.where.push_back(render_comparison(cmp));
      }
      return;
    }
    case NodeKind::SemFilter: {
      render_source(state, node.children[0]);
      const auto& pred = std::get<SemFilterPayload>(node.payload).predicate;
      state.where.push_back("SEMANTIC(" + quote_string(pred.template_text) + ")");
      return;
    }
    case NodeKind::SemProject: {
      render_source(state, node.children[0]);
      state.projections.push_back(&std::get<SemProjectPayload>(node.payload));
      return;
    }
    case NodeKind::Project: {
      render_source(state, node.children[0]);
      return;
    }
    case NodeKind::TableScan: {
      if (state.first_source) {
        state.from_clause = std::get<TableScanPayload>(node.payload).table;
        state.first_source = false;
        return;
      }
      throw SemqlError(ErrorKind::Optimize, "unexpected second base source; no surface syntax");
    }
    default:
      throw SemqlError(ErrorKind::Optimize,
                       node_kind_name(node.kind) + " below the output projection has no surface syntax");
  }
}

}  // namespace

std::string render_sql(const PlanTree& tree) {
  NodeId cursor = tree.root;
  std::optional<uint64_t> limit;
  std::vector<SortKey> order_by;
  if (tree.node(cursor).kind == NodeKind::Limit) {
    limit = std::get<LimitPayload>(tree.node(cursor).payload).count;
    cursor = tree.node(cursor).children[0];
  }
  if (tree.node(cursor).kind == NodeKind::Sort) {
    order_by = std::get<SortPayload>(tree.node(cursor).payload).keys;
    cursor = tree.node(cursor).children[0];
  }
  if (tree.node(cursor).kind != NodeKind::Project) {
    throw SemqlError(ErrorKind::Optimize, "plan without an output projection has no surface syntax");
  }
  const auto& project = std::get<ProjectPayload>(tree.node(cursor).payload);

  RenderState state{tree, {}, {}, "", true};
  render_source(state, tree.node(cursor).children[0]);

  // SELECT list: emit * when the projection covers the full input schema
  auto input_schema = output_schema(tree, tree.node(cursor).children[0]);
  bool star = project.columns.size() == input_schema.size();
  if (star) {
    for (size_t i = 0; i < project.columns.size(); ++i) {
      if (project.columns[i] != input_schema[i].ref()) {
        star = false;
        break;
      }
    }
  }

  std::string select_list;
  if (star && state.projections.empty()) {
    select_list = "*";
  } else {
    bool first = true;
    for (const auto& col : project.columns) {
      if (!first) select_list += ", ";
      first = false;
      if (col.table.empty()) {
        const SemProjectPayload* found = nullptr;
        for (const auto* sp : state.projections) {
          if (sp->output_name == col.column) found = sp;
        }
        if (!found) {
          throw SemqlError(ErrorKind::Optimize, "derived column '" + col.column + "' has no producing projection");
        }
        std::string func = found->predicate.output_type == ColumnType::Integer ? "SEMANTIC_INT" : "SEMANTIC_STRING";
        select_list += func + "(" + quote_string(found->predicate.template_text) + ") AS " + found->output_name;
      } else {
        select_list += render_column(col);
      }
    }
  }

  for (const auto* sp : state.projections) {
    bool projected = std::find(project.columns.begin(), project.columns.end(), ColumnRef{"", sp->output_name}) !=
                     project.columns.end();
    if (!projected) {
      throw SemqlError(ErrorKind::Optimize,
                       "semantic projection '" + sp->output_name + "' is not in the output schema; no surface syntax");
    }
  }

  std::string sql = "SELECT " + select_list + " FROM " + state.from_clause;
  if (!state.where.empty()) {
    sql += " WHERE ";
    for (size_t i = 0; i < state.where.size(); ++i) {
      if (i > 0) sql += " AND ";
      sql += state.where[i];
    }
  }
  if (!order_by.empty()) {
    sql += " ORDER BY ";
    for (size_t i = 0; i < order_by.size(); ++i) {
      if (i > 0) sql += ", ";
      sql += render_column(order_by[i].column);
      if (order_by[i].descending) sql += " DESC";
    }
  }
  if (limit) sql += " LIMIT " + std::to_string(*limit);
  return sql + ";";
}

}  // namespace semql
