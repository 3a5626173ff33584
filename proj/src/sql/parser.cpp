#include "sql/parser.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "common/error.hpp"
#include "sql/lexer.hpp"

namespace semql {

namespace {

struct ColumnToken {
  std::string qualifier;  // empty when unqualified
  std::string name;
  size_t position = 0;
};

struct SelectItem {
  enum class Kind { Star, Column, Semantic } kind = Kind::Star;
  ColumnToken column;
  ColumnType semantic_type = ColumnType::Text;
  std::string semantic_template;
  std::string output_name;
  size_t position = 0;
};

struct RawComparison {
  ColumnToken column;
  CompareOp op = CompareOp::Equal;
  std::vector<Value> operands;
  std::optional<ColumnToken> rhs_column;
};

struct Conjunct {
  bool semantic = false;
  RawComparison comparison;
  std::string semantic_template;
  size_t position = 0;
};

struct JoinClause {
  bool cross = false;
  std::string table;
  std::string alias;
  std::vector<std::pair<ColumnToken, ColumnToken>> equi_keys;
  std::vector<Conjunct> semantic_conditions;
  size_t position = 0;
};

struct RawSelect {
  std::vector<SelectItem> items;
  std::string base_table;
  std::string base_alias;
  size_t base_position = 0;
  std::vector<JoinClause> joins;
  std::vector<Conjunct> where;
  std::vector<std::pair<ColumnToken, bool>> order_by;  // (column, descending)
  std::optional<uint64_t> limit;
};

class Parser {
 public:
  Parser(const std::string& sql, const Catalog& catalog) : catalog_(catalog), tokens_(tokenize(sql)) {}

  PlanTree run() {
    if (peek().kind == TokenKind::Keyword && peek().text == "WITH") {
      advance();
      while (true) {
        std::string name = expect_identifier("CTE name");
        expect_keyword("AS");
        expect_symbol("(");
        RawSelect body = parse_select();
        expect_symbol(")");
        if (ctes_.count(name)) throw error_here("duplicate CTE name '" + name + "'");
        PlanTree cte_tree = bind_select(body);
        ctes_.emplace(name, std::move(cte_tree));
        if (peek_symbol(",")) {
          advance();
          continue;
        }
        break;
      }
    }
    RawSelect top = parse_select();
    if (peek_symbol(";")) advance();
    if (peek().kind != TokenKind::End) throw error_here("unexpected trailing input");
    PlanTree tree = bind_select(top);
    auto violations = validate(tree);
    if (!violations.empty()) {
      throw SemqlError(ErrorKind::Bind, "plan invalid after parse: " + violations.front().message);
    }
    return tree;
  }

 private:
  const Catalog& catalog_;
  std::vector<Token> tokens_;
  size_t pos_ = 0;
  std::map<std::string, PlanTree> ctes_;

  const Token& peek(size_t ahead = 0) const {
    size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  void advance() {
    if (pos_ + 1 < tokens_.size()) ++pos_;
  }
  bool peek_keyword(const std::string& kw) const { return peek().kind == TokenKind::Keyword && peek().text == kw; }
  bool peek_symbol(const std::string& s) const { return peek().kind == TokenKind::Symbol && peek().text == s; }

  SemqlError error_here(const std::string& message) const {
    return SemqlError(ErrorKind::Parse, message + " at position " + std::to_string(peek().position), peek().position);
  }

  void expect_keyword(const std::string& kw) {
    if (!peek_keyword(kw)) throw error_here("expected " + kw);
    advance();
  }
  void expect_symbol(const std::string& s) {
    if (!peek_symbol(s)) throw error_here("expected '" + s + "'");
    advance();
  }
  std::string expect_identifier(const std::string& what) {
    if (peek().kind != TokenKind::Identifier) throw error_here("expected " + what);
    std::string out = peek().text;
    advance();
    return out;
  }
  std::string expect_string(const std::string& what) {
    if (peek().kind != TokenKind::String) throw error_here("expected " + what);
    std::string out = peek().text;
    advance();
    return out;
  }

  // --- syntax ---

  ColumnToken parse_column_token() {
    ColumnToken out;
    out.position = peek().position;
    out.name = expect_identifier("column name");
    if (peek_symbol(".")) {
      advance();
      out.qualifier = out.name;
      out.name = expect_identifier("column name");
    }
    return out;
  }

  Value parse_literal() {
    const Token& t = peek();
    if (t.kind == TokenKind::Number) {
      advance();
      try {
        if (t.text.find('.') == std::string::npos) {
          return static_cast<int64_t>(std::stoll(t.text));
        }
        return std::stod(t.text);
      } catch (const std::exception&) {
        throw SemqlError(ErrorKind::Parse, "numeric literal out of range at position " + std::to_string(t.position),
                         t.position);
      }
    }
    if (t.kind == TokenKind::String) {
      advance();
      return t.text;
    }
    if (t.kind == TokenKind::Keyword && t.text == "TRUE") {
      advance();
      return true;
    }
    if (t.kind == TokenKind::Keyword && t.text == "FALSE") {
      advance();
      return false;
    }
    if (t.kind == TokenKind::Keyword && t.text == "NULL") {
      advance();
      return std::monostate{};
    }
    throw error_here("expected literal");
  }

  RawSelect parse_select() {
    RawSelect out;
    expect_keyword("SELECT");
    if (peek_symbol("*")) {
      advance();
      out.items.push_back(SelectItem{SelectItem::Kind::Star, {}, ColumnType::Text, "", "", peek().position});
    } else {
      while (true) {
        out.items.push_back(parse_select_item());
        if (peek_symbol(",")) {
          advance();
          continue;
        }
        break;
      }
    }
    expect_keyword("FROM");
    out.base_position = peek().position;
    out.base_table = expect_identifier("table name");
    out.base_alias = parse_alias(out.base_table);

    while (true) {
      if (peek_keyword("CROSS")) {
        advance();
        expect_keyword("JOIN");
        JoinClause join;
        join.cross = true;
        join.position = peek().position;
        join.table = expect_identifier("table name");
        join.alias = parse_alias(join.table);
        out.joins.push_back(std::move(join));
        continue;
      }
      if (peek_keyword("INNER") || peek_keyword("JOIN")) {
        if (peek_keyword("INNER")) advance();
        expect_keyword("JOIN");
        JoinClause join;
        join.position = peek().position;
        join.table = expect_identifier("table name");
        join.alias = parse_alias(join.table);
        expect_keyword("ON");
        while (true) {
          if (peek_keyword("SEMANTIC")) {
            size_t position = peek().position;
            advance();
            expect_symbol("(");
            std::string tmpl = expect_string("SEMANTIC template string");
            expect_symbol(")");
            Conjunct c;
            c.semantic = true;
            c.semantic_template = tmpl;
            c.position = position;
            join.semantic_conditions.push_back(std::move(c));
          } else {
            ColumnToken left = parse_column_token();
            expect_symbol("=");
            ColumnToken right = parse_column_token();
            join.equi_keys.emplace_back(std::move(left), std::move(right));
          }
          if (peek_keyword("AND")) {
            advance();
            continue;
          }
          break;
        }
        out.joins.push_back(std::move(join));
        continue;
      }
      break;
    }

    if (peek_keyword("WHERE")) {
      advance();
      while (true) {
        out.where.push_back(parse_conjunct());
        if (peek_keyword("AND")) {
          advance();
          continue;
        }
        if (peek_keyword("OR")) {
          throw error_here("OR is not supported; predicates must be AND-conjunctions");
        }
        break;
      }
    }

    if (peek_keyword("ORDER")) {
      advance();
      expect_keyword("BY");
      while (true) {
        ColumnToken col = parse_column_token();
        bool desc = false;
        if (peek_keyword("ASC")) {
          advance();
        } else if (peek_keyword("DESC")) {
          advance();
          desc = true;
        }
        out.order_by.emplace_back(std::move(col), desc);
        if (peek_symbol(",")) {
          advance();
          continue;
        }
        break;
      }
    }

    if (peek_keyword("LIMIT")) {
      advance();
      if (peek().kind != TokenKind::Number || peek().text.find('.') != std::string::npos) {
        throw error_here("expected integer LIMIT count");
      }
      try {
        out.limit = static_cast<uint64_t>(std::stoull(peek().text));
      } catch (const std::exception&) {
        throw error_here("LIMIT count out of range");
      }
      advance();
    }
    return out;
  }

  std::string parse_alias(const std::string& table) {
    if (peek_keyword("AS")) {
      advance();
      return expect_identifier("alias");
    }
    if (peek().kind == TokenKind::Identifier) {
      std::string alias = peek().text;
      advance();
      return alias;
    }
    return table;
  }

  SelectItem parse_select_item() {
    SelectItem item;
    item.position = peek().position;
    if (peek_keyword("SEMANTIC_STRING") || peek_keyword("SEMANTIC_INT")) {
      item.kind = SelectItem::Kind::Semantic;
      item.semantic_type = peek().text == "SEMANTIC_INT" ? ColumnType::Integer : ColumnType::Text;
      advance();
      expect_symbol("(");
      item.semantic_template = expect_string("template string");
      expect_symbol(")");
      expect_keyword("AS");
      item.output_name = expect_identifier("output column name");
      return item;
    }
    if (peek_keyword("SEMANTIC")) {
      throw error_here("SEMANTIC(...) is boolean and cannot appear in the SELECT list; use SEMANTIC_STRING or SEMANTIC_INT");
    }
    item.kind = SelectItem::Kind::Column;
    item.column = parse_column_token();
    if (peek_keyword("AS")) {
      throw error_here("column aliases are not supported; AS is only valid on SEMANTIC_* items");
    }
    return item;
  }

  Conjunct parse_conjunct() {
    Conjunct out;
    out.position = peek().position;
    if (peek_keyword("SEMANTIC")) {
      advance();
      expect_symbol("(");
      out.semantic = true;
      out.semantic_template = expect_string("SEMANTIC template string");
      expect_symbol(")");
      return out;
    }
    if (peek_keyword("SEMANTIC_STRING") || peek_keyword("SEMANTIC_INT")) {
      throw error_here("non-boolean SEMANTIC_* call cannot be used as a WHERE predicate");
    }
    RawComparison cmp;
    cmp.column = parse_column_token();
    if (peek_keyword("IS")) {
      advance();
      if (peek_keyword("NOT")) {
        advance();
        expect_keyword("NULL");
        cmp.op = CompareOp::IsNotNull;
      } else {
        expect_keyword("NULL");
        cmp.op = CompareOp::IsNull;
      }
      out.comparison = std::move(cmp);
      return out;
    }
    if (peek_keyword("BETWEEN")) {
      advance();
      cmp.op = CompareOp::Between;
      cmp.operands.push_back(parse_literal());
      expect_keyword("AND");
      cmp.operands.push_back(parse_literal());
      out.comparison = std::move(cmp);
      return out;
    }
    if (peek_keyword("IN")) {
      advance();
      expect_symbol("(");
      cmp.op = CompareOp::InList;
      while (true) {
        cmp.operands.push_back(parse_literal());
        if (peek_symbol(",")) {
          advance();
          continue;
        }
        break;
      }
      expect_symbol(")");
      out.comparison = std::move(cmp);
      return out;
    }
    if (peek().kind != TokenKind::Symbol) throw error_here("expected comparison operator");
    auto op = compare_op_from_name(peek().text);
    if (!op || *op == CompareOp::Between || *op == CompareOp::InList) throw error_here("expected comparison operator");
    cmp.op = *op;
    advance();
    if (peek().kind == TokenKind::Identifier) {
      cmp.rhs_column = parse_column_token();
    } else {
      cmp.operands.push_back(parse_literal());
    }
    out.comparison = std::move(cmp);
    return out;
  }

  // --- binding ---

  struct ScopeEntry {
    std::string alias;
    bool is_cte = false;
    std::string base_table;                  // when !is_cte
    std::vector<OutputColumn> cte_schema;    // when is_cte
  };

  struct BindContext {
    std::vector<ScopeEntry> scope;
    std::vector<std::pair<std::string, ColumnType>> semantic_outputs;  // SELECT-list SP aliases
  };

  ColumnRef resolve_column(const BindContext& ctx, const ColumnToken& token) const {
    if (!token.qualifier.empty()) {
      for (const auto& entry : ctx.scope) {
        if (entry.alias != token.qualifier) continue;
        if (entry.is_cte) {
          for (const auto& col : entry.cte_schema) {
            if (col.name == token.name) return ColumnRef{col.table, col.name};
          }
          throw SemqlError(ErrorKind::Bind,
                           "unknown column '" + token.qualifier + "." + token.name + "'", token.position);
        }
        auto it = catalog_.tables.find(entry.base_table);
        if (it == catalog_.tables.end()) {
          throw SemqlError(ErrorKind::Bind, "unknown table '" + entry.base_table + "'", token.position);
        }
        if (!it->second.column_type(token.name)) {
          throw SemqlError(ErrorKind::Bind,
                           "unknown column '" + token.qualifier + "." + token.name + "'", token.position);
        }
        return ColumnRef{entry.base_table, token.name};
      }
      throw SemqlError(ErrorKind::Bind, "unknown table or alias '" + token.qualifier + "'", token.position);
    }
    std::optional<ColumnRef> found;
    for (const auto& entry : ctx.scope) {
      if (entry.is_cte) {
        for (const auto& col : entry.cte_schema) {
          if (col.name != token.name) continue;
          if (found && !(*found == ColumnRef{col.table, col.name})) {
            throw SemqlError(ErrorKind::Bind, "ambiguous column '" + token.name + "'", token.position);
          }
          found = ColumnRef{col.table, col.name};
        }
      } else {
        auto it = catalog_.tables.find(entry.base_table);
        if (it != catalog_.tables.end() && it->second.column_type(token.name)) {
          if (found && !(*found == ColumnRef{entry.base_table, token.name})) {
            throw SemqlError(ErrorKind::Bind, "ambiguous column '" + token.name + "'", token.position);
          }
          found = ColumnRef{entry.base_table, token.name};
        }
      }
    }
    if (!found) {
      for (const auto& [name, type] : ctx.semantic_outputs) {
        if (name == token.name) return ColumnRef{"", name};
      }
      throw SemqlError(ErrorKind::Bind, "unknown column '" + token.name + "'", token.position);
    }
    return *found;
  }

  SemanticPredicate bind_template(const BindContext& ctx, const std::string& raw_template, ColumnType output_type,
                                  size_t position) const {
    SemanticPredicate pred;
    pred.output_type = output_type;
    std::string canonical;
    size_t pos = 0;
    while (pos < raw_template.size()) {
      size_t open = raw_template.find('{', pos);
      if (open == std::string::npos) {
        canonical += raw_template.substr(pos);
        break;
      }
      size_t close = raw_template.find('}', open + 1);
      if (close == std::string::npos) {
        throw SemqlError(ErrorKind::Bind, "unterminated placeholder in SEMANTIC template", position);
      }
      canonical += raw_template.substr(pos, open - pos);
      std::string token_text = raw_template.substr(open + 1, close - open - 1);
      ColumnToken token;
      token.position = position;
      size_t dot = token_text.find('.');
      if (dot == std::string::npos) {
        token.name = token_text;
      } else {
        token.qualifier = token_text.substr(0, dot);
        token.name = token_text.substr(dot + 1);
      }
      if (token.name.empty()) {
        throw SemqlError(ErrorKind::Bind, "empty placeholder in SEMANTIC template", position);
      }
      ColumnRef ref = resolve_column(ctx, token);
      canonical += "{" + ref.to_string() + "}";
      if (std::find(pred.referenced_columns.begin(), pred.referenced_columns.end(), ref) ==
          pred.referenced_columns.end()) {
        pred.referenced_columns.push_back(ref);
      }
      pos = close + 1;
    }
    if (pred.referenced_columns.empty()) {
      throw SemqlError(ErrorKind::Bind, "SEMANTIC template has no {column} placeholders", position);
    }
    pred.template_text = canonical;
    return pred;
  }

  // deep-copies `source` into `dest` with fresh node ids, returns new root
  static NodeId clone_into(PlanTree& dest, const PlanTree& source, NodeId source_root) {
    const PlanNode& node = source.node(source_root);
    std::vector<NodeId> children;
    for (NodeId child : node.children) children.push_back(clone_into(dest, source, child));
    return dest.add_node(node.kind, node.payload, std::move(children));
  }

  static bool schema_covers(const std::vector<OutputColumn>& schema, const std::vector<ColumnRef>& refs) {
    for (const auto& ref : refs) {
      bool found = false;
      for (const auto& col : schema) {
        if (col.table == ref.table && col.name == ref.column) {
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
    return true;
  }

  // lowest insertion point whose output provides every referenced column;
  // never descends through existing filters or block operators (new filters
  // stack above them)
  static NodeId find_attach(const PlanTree& tree, NodeId from, const std::vector<ColumnRef>& refs) {
    NodeId cur = from;
    while (true) {
      const PlanNode& node = tree.node(cur);
      if (is_block_operator(node.kind) || node.kind == NodeKind::RelFilter || node.kind == NodeKind::SemFilter) {
        return cur;
      }
      NodeId pick = 0;
      bool picked = false;
      for (NodeId child : node.children) {
        if (schema_covers(output_schema(tree, child), refs)) {
          pick = child;
          picked = true;
          break;
        }
      }
      if (!picked) return cur;
      NodeKind kind = tree.node(pick).kind;
      if (is_block_operator(kind) || kind == NodeKind::RelFilter || kind == NodeKind::SemFilter) return pick;
      cur = pick;
    }
  }

  PlanTree bind_select(const RawSelect& raw) {
    PlanTree tree;
    tree.catalog = catalog_;
    BindContext ctx;

    // FROM tree
    auto add_source = [&](const std::string& table, const std::string& alias, size_t position) -> NodeId {
      for (const auto& entry : ctx.scope) {
        if (entry.alias == alias) {
          throw SemqlError(ErrorKind::Bind, "duplicate alias '" + alias + "'", position);
        }
      }
      auto cte = ctes_.find(table);
      if (cte != ctes_.end()) {
        NodeId root = clone_into(tree, cte->second, cte->second.root);
        ScopeEntry entry;
        entry.alias = alias;
        entry.is_cte = true;
        entry.cte_schema = output_schema(tree, root);
        ctx.scope.push_back(std::move(entry));
        return root;
      }
      if (!catalog_.has_table(table)) {
        throw SemqlError(ErrorKind::Bind, "unknown table '" + table + "'", position);
      }
      ScopeEntry entry;
      entry.alias = alias;
      entry.base_table = table;
      ctx.scope.push_back(std::move(entry));
      return tree.add_node(NodeKind::TableScan, TableScanPayload{table}, {});
    };

    NodeId from_root = add_source(raw.base_table, raw.base_alias, raw.base_position);
    std::vector<Conjunct> semantic_join_conditions;
    for (const auto& join : raw.joins) {
      NodeId right = add_source(join.table, join.alias, join.position);
      if (join.cross) {
        from_root = tree.add_node(NodeKind::CrossJoin, CrossJoinPayload{}, {from_root, right});
        continue;
      }
      InnerJoinPayload payload;
      auto left_schema = output_schema(tree, from_root);
      auto right_schema = output_schema(tree, right);
      for (const auto& [l, r] : join.equi_keys) {
        ColumnRef lref = resolve_column(ctx, l);
        ColumnRef rref = resolve_column(ctx, r);
        bool l_on_left = schema_covers(left_schema, {lref});
        bool r_on_right = schema_covers(right_schema, {rref});
        if (l_on_left && r_on_right) {
          payload.keys.emplace_back(lref, rref);
        } else if (schema_covers(left_schema, {rref}) && schema_covers(right_schema, {lref})) {
          payload.keys.emplace_back(rref, lref);
        } else {
          throw SemqlError(ErrorKind::Bind, "join key does not span both join inputs", join.position);
        }
      }
      if (payload.keys.empty() && join.semantic_conditions.empty()) {
        throw SemqlError(ErrorKind::Bind, "INNER JOIN requires an ON condition", join.position);
      }
      from_root = tree.add_node(NodeKind::InnerJoin, std::move(payload), {from_root, right});
      for (const auto& cond : join.semantic_conditions) semantic_join_conditions.push_back(cond);
    }

    // one base table may be scanned at most once across the inlined FROM closure
    {
      std::map<std::string, int> scan_count;
      for (const auto& [id, node] : tree.nodes) {
        if (node.kind == NodeKind::TableScan) scan_count[std::get<TableScanPayload>(node.payload).table]++;
      }
      for (const auto& [table, count] : scan_count) {
        if (count > 1) {
          throw SemqlError(ErrorKind::Bind, "table '" + table + "' is used more than once in the query");
        }
      }
    }
    tree.root = from_root;

    // SELECT-list semantic projections, placed at their lowest feasible position
    std::vector<ColumnRef> project_columns;
    for (const auto& item : raw.items) {
      if (item.kind != SelectItem::Kind::Semantic) continue;
      for (const auto& [name, type] : ctx.semantic_outputs) {
        if (name == item.output_name) {
          throw SemqlError(ErrorKind::Bind, "duplicate output column '" + name + "'", item.position);
        }
      }
      SemanticPredicate pred = bind_template(ctx, item.semantic_template, item.semantic_type, item.position);
      NodeId attach = find_attach(tree, tree.root, pred.referenced_columns);
      NodeId sp = tree.add_node(NodeKind::SemProject, SemProjectPayload{std::move(pred), item.output_name}, {});
      insert_above(tree, sp, attach);
      ctx.semantic_outputs.emplace_back(item.output_name, item.semantic_type);
    }

    // WHERE conjuncts: relational ones first so they stack below semantic
    // filters at a shared attach point, then semantic ones in source order
    auto insert_filter = [&](NodeId node_id, const std::vector<ColumnRef>& refs, size_t position) {
      NodeId attach = find_attach(tree, tree.root, refs);
      if (!schema_covers(output_schema(tree, attach), refs)) {
        throw SemqlError(ErrorKind::Bind, "predicate references columns from no single plan position", position);
      }
      insert_above(tree, node_id, attach);
    };

    for (const auto& conj : raw.where) {
      if (conj.semantic) continue;
      Comparison cmp;
      cmp.column = resolve_column(ctx, conj.comparison.column);
      cmp.op = conj.comparison.op;
      cmp.operands = conj.comparison.operands;
      if (conj.comparison.rhs_column) cmp.rhs_column = resolve_column(ctx, *conj.comparison.rhs_column);
      std::vector<ColumnRef> refs = cmp.referenced_columns();
      NodeId filter = tree.add_node(NodeKind::RelFilter, RelFilterPayload{{std::move(cmp)}}, {});
      insert_filter(filter, refs, conj.position);
    }
    std::vector<Conjunct> semantic_conjuncts = raw.where;
    semantic_conjuncts.insert(semantic_conjuncts.end(), semantic_join_conditions.begin(),
                              semantic_join_conditions.end());
    for (const auto& conj : semantic_conjuncts) {
      if (!conj.semantic) continue;
      SemanticPredicate pred = bind_template(ctx, conj.semantic_template, ColumnType::Boolean, conj.position);
      std::vector<ColumnRef> refs = pred.referenced_columns;
      NodeId filter = tree.add_node(NodeKind::SemFilter, SemFilterPayload{std::move(pred), std::nullopt}, {});
      insert_filter(filter, refs, conj.position);
    }

    // root projection defines the user-visible schema
    auto full_schema = output_schema(tree, tree.root);
    for (const auto& item : raw.items) {
      if (item.kind == SelectItem::Kind::Star) {
        for (const auto& col : full_schema) {
          project_columns.push_back(col.ref());
        }
      } else if (item.kind == SelectItem::Kind::Column) {
        project_columns.push_back(resolve_column(ctx, item.column));
      } else {
        project_columns.push_back(ColumnRef{"", item.output_name});
      }
    }
    NodeId project = tree.add_node(NodeKind::Project, ProjectPayload{project_columns}, {tree.root});
    tree.root = project;

    if (!raw.order_by.empty()) {
      SortPayload payload;
      for (const auto& [col, desc] : raw.order_by) {
        ColumnRef ref = resolve_column(ctx, col);
        if (std::find(project_columns.begin(), project_columns.end(), ref) == project_columns.end()) {
          throw SemqlError(ErrorKind::Bind, "ORDER BY column " + ref.to_string() + " is not in the SELECT list",
                           col.position);
        }
        payload.keys.push_back(SortKey{ref, desc});
      }
      tree.root = tree.add_node(NodeKind::Sort, std::move(payload), {tree.root});
    }
    if (raw.limit) {
      tree.root = tree.add_node(NodeKind::Limit, LimitPayload{*raw.limit}, {tree.root});
    }
    return tree;
  }
};

}  // namespace

PlanTree parse(const std::string& sql, const Catalog& catalog) {
  if (sql.empty()) throw SemqlError(ErrorKind::Parse, "empty query", 0);
  Parser parser(sql, catalog);
  return parser.run();
}

}  // namespace semql
