#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "jstrack/ast.hpp"
#include "jstrack/lexer.hpp"

namespace jstrack {

// Recursive-descent parser for an ES5-flavoured subset. Statements using
// constructs outside the subset degrade to Skipped markers; a ParseError
// escapes only when recovery is impossible (unbalanced braces at top level).
class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  NodePtr parse_program() {
    auto prog = make_node(NodeKind::Program);
    while (!at_end()) {
      if (peek().is_punct("}")) throw ParseError(peek().line, "unbalanced '}' at top level");
      prog->add(parse_statement_tolerant());
    }
    return prog;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  bool at_end() const { return pos_ >= toks_.size(); }
  const Token& peek(std::size_t ahead = 0) const {
    static const Token eof{TokenKind::Punctuator, "", 0};
    return pos_ + ahead < toks_.size() ? toks_[pos_ + ahead] : eof;
  }
  const Token& prev() const { return toks_[pos_ - 1]; }
  const Token& advance() { return toks_[pos_++]; }
  int line() const { return at_end() ? (toks_.empty() ? 1 : toks_.back().line) : peek().line; }

  bool match_punct(std::string_view t) {
    if (!at_end() && peek().is_punct(t)) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool match_keyword(std::string_view t) {
    if (!at_end() && peek().is_keyword(t)) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect_punct(std::string_view t) {
    if (!match_punct(t)) throw ParseError(line(), std::string("expected '") + std::string(t) + "'");
  }

  // Automatic semicolon insertion, restricted to the cases the corpus needs:
  // an explicit ';', a following '}', end of input, or a line break.
  void expect_semi() {
    if (match_punct(";")) return;
    if (at_end() || peek().is_punct("}")) return;
    if (pos_ > 0 && peek().line > prev().line) return;
    throw ParseError(line(), "expected ';'");
  }

  NodePtr parse_statement_tolerant() {
    std::size_t start = pos_;
    try {
      return parse_statement();
    } catch (const ParseError& e) {
      pos_ = start;
      return skip_statement(e);
    }
  }

  // Consume one malformed/unsupported statement: up to ';' at brace depth 0,
  // or past the close of any brace it opened. EOF inside an open brace means
  // the program itself is unbalanced, so the original error propagates.
  NodePtr skip_statement(const ParseError& original) {
    int ln = line();
    int depth = 0;
    while (!at_end()) {
      const Token& t = advance();
      if (t.is_punct("{")) ++depth;
      else if (t.is_punct("}")) {
        if (depth == 0) {
          --pos_;  // closing an outer block; leave it for the caller
          break;
        }
        if (--depth == 0) {
          match_punct(";");
          break;
        }
      } else if (t.is_punct(";") && depth == 0) {
        break;
      }
    }
    if (depth > 0) throw original;
    return make_node(NodeKind::Skipped, "", ln);
  }

  NodePtr parse_statement() {
    if (at_end()) throw ParseError(line(), "unexpected end of input");
    const Token& t = peek();
    if (t.is_punct("{")) return parse_block();
    if (t.is_punct(";")) {
      advance();
      return make_node(NodeKind::Empty, "", t.line);
    }
    if (t.kind == TokenKind::Keyword) {
      const std::string& kw = t.text;
      if (kw == "var" || kw == "let" || kw == "const") return parse_var_decl(true);
      if (kw == "function") {
        if (peek(1).kind == TokenKind::Identifier) return parse_function(true);
        auto stmt = make_node(NodeKind::ExprStmt, "", t.line);
        stmt->add(parse_expression());
        expect_semi();
        return stmt;
      }
      if (kw == "if") return parse_if();
      if (kw == "while") return parse_while();
      if (kw == "do") return parse_do_while();
      if (kw == "for") return parse_for();
      if (kw == "return") return parse_return();
      if (kw == "break" || kw == "continue") {
        advance();
        if (!at_end() && peek().kind == TokenKind::Identifier && peek().line == t.line)
          advance();  // label
        expect_semi();
        return make_node(NodeKind::Skipped, kw, t.line);
      }
      if (kw == "debugger") {
        advance();
        expect_semi();
        return make_node(NodeKind::Skipped, kw, t.line);
      }
      // switch/try/throw/with/class/import/export and friends are outside
      // the subset; the tolerant wrapper turns this into a Skipped marker.
      if (kw != "this" && kw != "new" && kw != "typeof" && kw != "delete" &&
          kw != "void" && kw != "true" && kw != "false" && kw != "null" &&
          kw != "undefined")
        throw ParseError(t.line, "unsupported statement keyword '" + kw + "'");
    }
    // `label: stmt` — drop the label.
    if (t.kind == TokenKind::Identifier && peek(1).is_punct(":")) {
      advance();
      advance();
      return parse_statement();
    }
    auto stmt = make_node(NodeKind::ExprStmt, "", t.line);
    stmt->add(parse_expression());
    expect_semi();
    return stmt;
  }

  NodePtr parse_block() {
    int ln = line();
    expect_punct("{");
    auto block = make_node(NodeKind::Block, "", ln);
    while (!at_end() && !peek().is_punct("}")) block->add(parse_statement_tolerant());
    if (at_end()) throw ParseError(ln, "unterminated block");
    advance();
    return block;
  }

  NodePtr parse_var_decl(bool consume_semi, bool no_in = false) {
    int ln = line();
    advance();  // var/let/const
    auto decl = make_node(NodeKind::VarDecl, "", ln);
    while (true) {
      if (at_end() || peek().kind != TokenKind::Identifier)
        throw ParseError(line(), "expected identifier in declaration");
      auto d = make_node(NodeKind::Declarator, advance().text, prev().line);
      if (match_punct("=")) d->add(parse_assignment(no_in));
      decl->add(std::move(d));
      if (!match_punct(",")) break;
    }
    if (consume_semi) expect_semi();
    return decl;
  }

  NodePtr parse_function(bool declaration) {
    int ln = line();
    advance();  // function
    std::string name;
    if (!at_end() && peek().kind == TokenKind::Identifier) name = advance().text;
    if (declaration && name.empty()) throw ParseError(ln, "function declaration needs a name");
    auto fn = make_node(NodeKind::Function, name, ln);
    auto params = make_node(NodeKind::Block, "", ln);
    expect_punct("(");
    if (!peek().is_punct(")")) {
      while (true) {
        if (at_end() || peek().kind != TokenKind::Identifier)
          throw ParseError(line(), "expected parameter name");
        params->add(make_node(NodeKind::Identifier, advance().text, prev().line));
        if (!match_punct(",")) break;
      }
    }
    expect_punct(")");
    fn->add(std::move(params));
    fn->add(parse_block());
    return fn;
  }

  NodePtr parse_if() {
    int ln = line();
    advance();
    expect_punct("(");
    auto node = make_node(NodeKind::If, "", ln);
    node->add(parse_expression());
    expect_punct(")");
    node->add(parse_statement());
    if (match_keyword("else")) node->add(parse_statement());
    return node;
  }

  NodePtr parse_while() {
    int ln = line();
    advance();
    expect_punct("(");
    auto node = make_node(NodeKind::While, "", ln);
    node->add(parse_expression());
    expect_punct(")");
    node->add(parse_statement());
    return node;
  }

  NodePtr parse_do_while() {
    int ln = line();
    advance();
    auto node = make_node(NodeKind::DoWhile, "", ln);
    node->add(parse_statement());
    if (!match_keyword("while")) throw ParseError(line(), "expected 'while' after do body");
    expect_punct("(");
    node->add(parse_expression());
    expect_punct(")");
    match_punct(";");
    return node;
  }

  NodePtr parse_for() {
    int ln = line();
    advance();
    expect_punct("(");
    auto init = NodePtr{};
    if (peek().is_punct(";")) {
      init = make_node(NodeKind::Empty, "", line());
    } else if (peek().is_keyword("var") || peek().is_keyword("let") || peek().is_keyword("const")) {
      init = parse_var_decl(false, /*no_in=*/true);
    } else {
      init = wrap_expr_stmt(parse_expression(/*no_in=*/true));
    }
    if (match_keyword("in")) {
      auto node = make_node(NodeKind::ForIn, "", ln);
      node->add(std::move(init));
      node->add(parse_expression());
      expect_punct(")");
      node->add(parse_statement());
      return node;
    }
    expect_punct(";");
    auto node = make_node(NodeKind::For, "", ln);
    node->add(std::move(init));
    node->add(peek().is_punct(";") ? make_node(NodeKind::Empty, "", line()) : parse_expression());
    expect_punct(";");
    node->add(peek().is_punct(")") ? make_node(NodeKind::Empty, "", line()) : parse_expression());
    expect_punct(")");
    node->add(parse_statement());
    return node;
  }

  NodePtr parse_return() {
    int ln = line();
    advance();
    auto node = make_node(NodeKind::Return, "", ln);
    bool value_follows = !at_end() && !peek().is_punct(";") && !peek().is_punct("}") &&
                         peek().line == ln;  // restricted production
    if (value_follows) node->add(parse_expression());
    expect_semi();
    return node;
  }

  NodePtr wrap_expr_stmt(NodePtr expr) {
    auto stmt = make_node(NodeKind::ExprStmt, "", expr->line);
    stmt->add(std::move(expr));
    return stmt;
  }

  // ----- expressions -----

  NodePtr parse_expression(bool no_in = false) {
    auto first = parse_assignment(no_in);
    while (match_punct(",")) {
      // Comma expression: evaluate both, value is the last. Keep the shape
      // as a Binary "," so lowering emits each operand.
      auto seq = make_node(NodeKind::Binary, ",", first->line);
      seq->add(std::move(first));
      seq->add(parse_assignment(no_in));
      first = std::move(seq);
    }
    return first;
  }

  NodePtr parse_assignment(bool no_in) {
    auto lhs = parse_conditional(no_in);
    static const char* assign_ops[] = {"=",  "+=", "-=", "*=",  "/=",  "%=",
                                       "&=", "|=", "^=", "<<=", ">>=", ">>>="};
    for (const char* op : assign_ops) {
      if (!at_end() && peek().is_punct(op)) {
        if (lhs->kind != NodeKind::Identifier && lhs->kind != NodeKind::Member &&
            lhs->kind != NodeKind::Index)
          throw ParseError(line(), "invalid assignment target");
        advance();
        auto node = make_node(NodeKind::Assign, op, lhs->line);
        node->add(std::move(lhs));
        node->add(parse_assignment(no_in));
        return node;
      }
    }
    return lhs;
  }

  NodePtr parse_conditional(bool no_in) {
    auto cond = parse_binary(0, no_in);
    if (match_punct("?")) {
      auto node = make_node(NodeKind::Conditional, "", cond->line);
      node->add(std::move(cond));
      node->add(parse_assignment(false));
      expect_punct(":");
      node->add(parse_assignment(no_in));
      return node;
    }
    return cond;
  }

  struct BinOp {
    const char* op;
    int prec;
    bool keyword;
  };
  static const std::vector<BinOp>& binary_ops() {
    static const std::vector<BinOp> ops = {
        {"||", 1, false}, {"&&", 2, false}, {"|", 3, false},  {"^", 4, false},
        {"&", 5, false},  {"==", 6, false}, {"!=", 6, false}, {"===", 6, false},
        {"!==", 6, false}, {"<", 7, false}, {">", 7, false},  {"<=", 7, false},
        {">=", 7, false}, {"in", 7, true},  {"instanceof", 7, true},
        {"<<", 8, false}, {">>", 8, false}, {">>>", 8, false},
        {"+", 9, false},  {"-", 9, false},  {"*", 10, false}, {"/", 10, false},
        {"%", 10, false}};
    return ops;
  }

  const BinOp* peek_binary(bool no_in) {
    if (at_end()) return nullptr;
    for (const BinOp& b : binary_ops()) {
      if (b.keyword ? peek().is_keyword(b.op) : peek().is_punct(b.op)) {
        if (no_in && b.keyword && std::string_view(b.op) == "in") return nullptr;
        return &b;
      }
    }
    return nullptr;
  }

  NodePtr parse_binary(int min_prec, bool no_in) {
    auto lhs = parse_unary(no_in);
    while (const BinOp* op = peek_binary(no_in)) {
      if (op->prec < min_prec) break;
      advance();
      auto rhs = parse_binary(op->prec + 1, no_in);
      auto node = make_node(NodeKind::Binary, op->op, lhs->line);
      node->add(std::move(lhs));
      node->add(std::move(rhs));
      lhs = std::move(node);
    }
    return lhs;
  }

  NodePtr parse_unary(bool no_in) {
    if (!at_end()) {
      const Token& t = peek();
      if (t.is_punct("!") || t.is_punct("~") || t.is_punct("+") || t.is_punct("-") ||
          t.is_keyword("typeof") || t.is_keyword("void") || t.is_keyword("delete")) {
        advance();
        auto node = make_node(NodeKind::Unary, t.text, t.line);
        node->add(parse_unary(no_in));
        return node;
      }
      if (t.is_punct("++") || t.is_punct("--")) {
        advance();
        auto node = make_node(NodeKind::Update, t.text, t.line);
        node->prefix = true;
        node->add(parse_unary(no_in));
        return node;
      }
    }
    return parse_postfix(no_in);
  }

  NodePtr parse_postfix(bool no_in) {
    auto expr = parse_call_chain(parse_primary(no_in));
    if (!at_end() && (peek().is_punct("++") || peek().is_punct("--")) &&
        peek().line == expr->line) {
      const Token& t = advance();
      auto node = make_node(NodeKind::Update, t.text, t.line);
      node->prefix = false;
      node->add(std::move(expr));
      return node;
    }
    return expr;
  }

  NodePtr parse_call_chain(NodePtr expr) {
    while (!at_end()) {
      if (match_punct(".")) {
        if (at_end() || (peek().kind != TokenKind::Identifier && peek().kind != TokenKind::Keyword))
          throw ParseError(line(), "expected property name after '.'");
        auto node = make_node(NodeKind::Member, advance().text, expr->line);
        node->add(std::move(expr));
        expr = std::move(node);
      } else if (match_punct("[")) {
        auto node = make_node(NodeKind::Index, "", expr->line);
        node->add(std::move(expr));
        node->add(parse_expression());
        expect_punct("]");
        expr = std::move(node);
      } else if (peek().is_punct("(")) {
        auto node = make_node(NodeKind::Call, "", expr->line);
        node->add(std::move(expr));
        parse_arguments(*node);
        expr = std::move(node);
      } else {
        break;
      }
    }
    return expr;
  }

  void parse_arguments(Node& call) {
    expect_punct("(");
    if (!peek().is_punct(")")) {
      while (true) {
        call.add(parse_assignment(false));
        if (!match_punct(",")) break;
      }
    }
    expect_punct(")");
  }

  NodePtr parse_primary(bool no_in) {
    if (at_end()) throw ParseError(line(), "unexpected end of expression");
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Number:
      case TokenKind::String:
      case TokenKind::Regex:
      case TokenKind::Template:
        advance();
        return make_node(NodeKind::Literal, t.text, t.line);
      case TokenKind::Identifier:
        advance();
        return make_node(NodeKind::Identifier, t.text, t.line);
      case TokenKind::Keyword:
        if (t.text == "true" || t.text == "false" || t.text == "null" ||
            t.text == "undefined" || t.text == "this") {
          advance();
          return make_node(NodeKind::Literal, t.text, t.line);
        }
        if (t.text == "function") return parse_function(false);
        if (t.text == "new") return parse_new();
        break;
      case TokenKind::Punctuator:
        if (t.text == "(") {
          advance();
          auto inner = parse_expression();
          expect_punct(")");
          return inner;
        }
        if (t.text == "[") return parse_array();
        if (t.text == "{") return parse_object();
        break;
    }
    throw ParseError(t.line, "unexpected token '" + t.text + "'");
  }

  NodePtr parse_new() {
    int ln = line();
    advance();  // new
    auto callee = parse_primary(false);
    // Member chain binds tighter than the call in `new a.b.C(...)`.
    while (!at_end() && (peek().is_punct(".") || peek().is_punct("["))) {
      if (match_punct(".")) {
        if (at_end() || (peek().kind != TokenKind::Identifier && peek().kind != TokenKind::Keyword))
          throw ParseError(line(), "expected property name after '.'");
        auto node = make_node(NodeKind::Member, advance().text, ln);
        node->add(std::move(callee));
        callee = std::move(node);
      } else {
        advance();
        auto node = make_node(NodeKind::Index, "", ln);
        node->add(std::move(callee));
        node->add(parse_expression());
        expect_punct("]");
        callee = std::move(node);
      }
    }
    auto node = make_node(NodeKind::New, "", ln);
    node->add(std::move(callee));
    if (peek().is_punct("(")) parse_arguments(*node);
    return parse_call_chain(std::move(node));
  }

  NodePtr parse_array() {
    int ln = line();
    expect_punct("[");
    auto arr = make_node(NodeKind::Array, "", ln);
    while (!at_end() && !peek().is_punct("]")) {
      arr->add(parse_assignment(false));
      if (!match_punct(",")) break;
    }
    expect_punct("]");
    return arr;
  }

  NodePtr parse_object() {
    int ln = line();
    expect_punct("{");
    auto obj = make_node(NodeKind::Object, "", ln);
    while (!at_end() && !peek().is_punct("}")) {
      const Token& key = peek();
      if (key.kind != TokenKind::Identifier && key.kind != TokenKind::String &&
          key.kind != TokenKind::Number && key.kind != TokenKind::Keyword)
        throw ParseError(key.line, "unsupported object key");
      advance();
      expect_punct(":");
      auto prop = make_node(NodeKind::Property, key.text, key.line);
      prop->add(parse_assignment(false));
      obj->add(std::move(prop));
      if (!match_punct(",")) break;
    }
    expect_punct("}");
    return obj;
  }
};

inline NodePtr parse(std::vector<Token> tokens) {
  return Parser(std::move(tokens)).parse_program();
}

inline NodePtr parse_source(std::string_view source) { return parse(lex(source)); }

}  // namespace jstrack
