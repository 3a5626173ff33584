#include "plan/plan_json.hpp"

#include "common/error.hpp"

namespace semql {

namespace {

using nlohmann::json;

json value_to_json(const Value& v) {
  if (is_null(v)) return nullptr;
  if (const auto* i = std::get_if<int64_t>(&v)) return *i;
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* b = std::get_if<bool>(&v)) return *b;
  return std::get<std::string>(v);
}

Value value_from_json(const json& j) {
  if (j.is_null()) return std::monostate{};
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<int64_t>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw SemqlError(ErrorKind::Parse, "unsupported JSON value type");
}

json column_ref_to_json(const ColumnRef& c) { return json{{"column", c.column}, {"table", c.table}}; }

ColumnRef column_ref_from_json(const json& j) {
  return ColumnRef{j.at("table").get<std::string>(), j.at("column").get<std::string>()};
}

json predicate_to_json(const SemanticPredicate& p) {
  json cols = json::array();
  for (const auto& c : p.referenced_columns) cols.push_back(column_ref_to_json(c));
  return json{{"columns", cols}, {"output_type", column_type_name(p.output_type)}, {"template", p.template_text}};
}

SemanticPredicate predicate_from_json(const json& j) {
  SemanticPredicate p;
  p.template_text = j.at("template").get<std::string>();
  for (const auto& c : j.at("columns")) p.referenced_columns.push_back(column_ref_from_json(c));
  auto type = column_type_from_name(j.at("output_type").get<std::string>());
  if (!type) throw SemqlError(ErrorKind::Parse, "unknown output type in predicate");
  p.output_type = *type;
  return p;
}

json node_to_json(const PlanNode& node) {
  json j;
  j["kind"] = node_kind_name(node.kind);
  j["children"] = node.children;
  if (const auto* scan = std::get_if<TableScanPayload>(&node.payload)) {
    j["table"] = scan->table;
  } else if (const auto* filter = std::get_if<RelFilterPayload>(&node.payload)) {
    json preds = json::array();
    for (const auto& c : filter->conjuncts) {
      json p{{"column", column_ref_to_json(c.column)}, {"op", compare_op_name(c.op)}};
      json vals = json::array();
      for (const auto& v : c.operands) vals.push_back(value_to_json(v));
      p["values"] = vals;
      if (c.rhs_column) p["rhs_column"] = column_ref_to_json(*c.rhs_column);
      preds.push_back(p);
    }
    j["predicates"] = preds;
  } else if (const auto* proj = std::get_if<ProjectPayload>(&node.payload)) {
    json cols = json::array();
    for (const auto& c : proj->columns) cols.push_back(column_ref_to_json(c));
    j["columns"] = cols;
  } else if (const auto* join = std::get_if<InnerJoinPayload>(&node.payload)) {
    json keys = json::array();
    for (const auto& [l, r] : join->keys) {
      keys.push_back(json{{"left", column_ref_to_json(l)}, {"right", column_ref_to_json(r)}});
    }
    j["keys"] = keys;
  } else if (const auto* cross = std::get_if<CrossJoinPayload>(&node.payload)) {
    j["from_join_decomposition"] = cross->from_join_decomposition;
  } else if (const auto* agg = std::get_if<AggregatePayload>(&node.payload)) {
    json groups = json::array();
    for (const auto& c : agg->group_by) groups.push_back(column_ref_to_json(c));
    j["group_by"] = groups;
    json aggs = json::array();
    for (const auto& a : agg->aggregates) {
      json e{{"as", a.output_name}};
      switch (a.op) {
        case AggregateOp::CountStar:
          e["op"] = "count_star";
          break;
        case AggregateOp::Count:
          e["op"] = "count";
          break;
        case AggregateOp::Sum:
          e["op"] = "sum";
          break;
        case AggregateOp::Min:
          e["op"] = "min";
          break;
        case AggregateOp::Max:
          e["op"] = "max";
          break;
      }
      if (a.column) e["column"] = column_ref_to_json(*a.column);
      aggs.push_back(e);
    }
    j["aggregates"] = aggs;
  } else if (const auto* limit = std::get_if<LimitPayload>(&node.payload)) {
    j["count"] = limit->count;
  } else if (const auto* sort = std::get_if<SortPayload>(&node.payload)) {
    json keys = json::array();
    for (const auto& k : sort->keys) {
      keys.push_back(json{{"column", column_ref_to_json(k.column)}, {"desc", k.descending}});
    }
    j["keys"] = keys;
  } else if (const auto* sf = std::get_if<SemFilterPayload>(&node.payload)) {
    j["predicate"] = predicate_to_json(sf->predicate);
    if (sf->selectivity) j["selectivity"] = *sf->selectivity;
  } else if (const auto* sp = std::get_if<SemProjectPayload>(&node.payload)) {
    j["predicate"] = predicate_to_json(sp->predicate);
    j["as"] = sp->output_name;
  }
  return j;
}

NodePayload payload_from_json(NodeKind kind, const json& j) {
  switch (kind) {
    case NodeKind::TableScan:
      return TableScanPayload{j.at("table").get<std::string>()};
    case NodeKind::RelFilter: {
      RelFilterPayload out;
      for (const auto& p : j.at("predicates")) {
        Comparison c;
        c.column = column_ref_from_json(p.at("column"));
        auto op = compare_op_from_name(p.at("op").get<std::string>());
        if (!op) throw SemqlError(ErrorKind::Parse, "unknown comparison op");
        c.op = *op;
        for (const auto& v : p.at("values")) c.operands.push_back(value_from_json(v));
        if (p.contains("rhs_column")) c.rhs_column = column_ref_from_json(p.at("rhs_column"));
        out.conjuncts.push_back(std::move(c));
      }
      return out;
    }
    case NodeKind::Project: {
      ProjectPayload out;
      for (const auto& c : j.at("columns")) out.columns.push_back(column_ref_from_json(c));
      return out;
    }
    case NodeKind::InnerJoin: {
      InnerJoinPayload out;
      for (const auto& k : j.at("keys")) {
        out.keys.emplace_back(column_ref_from_json(k.at("left")), column_ref_from_json(k.at("right")));
      }
      return out;
    }
    case NodeKind::CrossJoin: {
      CrossJoinPayload out;
      if (j.contains("from_join_decomposition")) out.from_join_decomposition = j.at("from_join_decomposition");
      return out;
    }
    case NodeKind::Aggregate: {
      AggregatePayload out;
      for (const auto& c : j.at("group_by")) out.group_by.push_back(column_ref_from_json(c));
      for (const auto& a : j.at("aggregates")) {
        AggregateExpr e;
        std::string op = a.at("op").get<std::string>();
        if (op == "count_star") {
          e.op = AggregateOp::CountStar;
        } else if (op == "count") {
          e.op = AggregateOp::Count;
        } else if (op == "sum") {
          e.op = AggregateOp::Sum;
        } else if (op == "min") {
          e.op = AggregateOp::Min;
        } else if (op == "max") {
          e.op = AggregateOp::Max;
        } else {
          throw SemqlError(ErrorKind::Parse, "unknown aggregate op '" + op + "'");
        }
        if (a.contains("column")) e.column = column_ref_from_json(a.at("column"));
        e.output_name = a.at("as").get<std::string>();
        out.aggregates.push_back(std::move(e));
      }
      return out;
    }
    case NodeKind::Limit:
      return LimitPayload{j.at("count").get<uint64_t>()};
    case NodeKind::Union:
      return UnionPayload{};
    case NodeKind::Sort: {
      SortPayload out;
      for (const auto& k : j.at("keys")) {
        out.keys.push_back(SortKey{column_ref_from_json(k.at("column")), k.at("desc").get<bool>()});
      }
      return out;
    }
    case NodeKind::SemFilter: {
      SemFilterPayload out;
      out.predicate = predicate_from_json(j.at("predicate"));
      if (j.contains("selectivity")) out.selectivity = j.at("selectivity").get<double>();
      return out;
    }
    case NodeKind::SemProject: {
      SemProjectPayload out;
      out.predicate = predicate_from_json(j.at("predicate"));
      out.output_name = j.at("as").get<std::string>();
      return out;
    }
  }
  throw SemqlError(ErrorKind::Parse, "unhandled node kind");
}

}  // namespace

nlohmann::json catalog_to_json(const Catalog& catalog) {
  json tables = json::object();
  for (const auto& [name, schema] : catalog.tables) {
    json cols = json::array();
    for (const auto& [col, type] : schema.columns) {
      cols.push_back(json{{"name", col}, {"type", column_type_name(type)}});
    }
    json t{{"columns", cols}};
    if (schema.row_count) t["row_count"] = *schema.row_count;
    tables[name] = t;
  }
  return json{{"tables", tables}};
}

Catalog catalog_from_json(const nlohmann::json& j) {
  Catalog out;
  const auto& tables = j.contains("tables") ? j.at("tables") : j;
  for (auto it = tables.begin(); it != tables.end(); ++it) {
    TableSchema schema;
    for (const auto& c : it.value().at("columns")) {
      auto type = column_type_from_name(c.at("type").get<std::string>());
      if (!type) throw SemqlError(ErrorKind::Parse, "unknown column type in catalog");
      schema.columns.emplace_back(c.at("name").get<std::string>(), *type);
    }
    if (it.value().contains("row_count")) schema.row_count = it.value().at("row_count").get<uint64_t>();
    out.tables[it.key()] = std::move(schema);
  }
  return out;
}

nlohmann::json tree_to_json(const PlanTree& tree) {
  json nodes = json::object();
  for (const auto& [id, node] : tree.nodes) {
    nodes[std::to_string(id)] = node_to_json(node);
  }
  return json{{"catalog", catalog_to_json(tree.catalog)}, {"nodes", nodes}, {"root", tree.root}};
}

PlanTree tree_from_json(const nlohmann::json& j) {
  PlanTree tree;
  tree.root = j.at("root").get<NodeId>();
  tree.catalog = catalog_from_json(j.at("catalog"));
  for (auto it = j.at("nodes").begin(); it != j.at("nodes").end(); ++it) {
    NodeId id = 0;
    try {
      id = static_cast<NodeId>(std::stoul(it.key()));
    } catch (const std::exception&) {
      throw SemqlError(ErrorKind::Parse, "node key '" + it.key() + "' is not an id");
    }
    PlanNode node;
    node.id = id;
    auto kind = node_kind_from_name(it.value().at("kind").get<std::string>());
    if (!kind) throw SemqlError(ErrorKind::Parse, "unknown node kind '" + it.value().at("kind").get<std::string>() + "'");
    node.kind = *kind;
    node.children = it.value().at("children").get<std::vector<NodeId>>();
    node.payload = payload_from_json(node.kind, it.value());
    tree.nodes[id] = std::move(node);
  }
  return tree;
}

std::string dump_canonical(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace semql
