#pragma once

#include <algorithm>
#include <deque>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "jstrack/ast.hpp"
#include "jstrack/parser.hpp"

namespace jstrack {

enum class StmtKind { Begin, End, Assign, GuardIf, GuardWhile, Return, Call, Skip };

// One line of the canonical form. `text` has no trailing semicolon;
// `guard` is the index of the nearest enclosing if/while guard (-1 if none)
// and is what the dependency graph uses for control edges.
struct CanonicalStmt {
  std::string text;
  StmtKind kind = StmtKind::Assign;
  std::vector<std::string> reads;
  std::vector<std::string> writes;
  int guard = -1;
};

struct CanonicalProgram {
  std::vector<CanonicalStmt> statements;
  int temp_count = 0;
};

// Global names that keep their spelling: they are the member roots and free
// functions that carry the tracking signal (document.cookie, unescape, ...)
// and no sane renaming obfuscator touches them.
inline const std::unordered_set<std::string>& reserved_globals() {
  static const std::unordered_set<std::string> names = {
      "document", "window",   "navigator", "location", "history",  "screen",
      "console",  "Math",     "JSON",      "Date",     "RegExp",   "String",
      "Number",   "Boolean",  "Array",     "Object",   "Function", "Error",
      "TypeError", "XMLHttpRequest", "localStorage", "sessionStorage",
      "setTimeout", "setInterval", "clearTimeout", "clearInterval",
      "encodeURIComponent", "decodeURIComponent", "encodeURI", "decodeURI",
      "escape",   "unescape", "parseInt",  "parseFloat", "isNaN", "isFinite",
      "eval",     "alert",    "prompt",    "confirm",  "this",    "arguments",
      "JSON",     "Image",    "Promise",   "$",        "jQuery",  "NaN",
      "Infinity"};
  return names;
}

inline bool is_temp_name(const std::string& s) {
  if (s.size() < 2 || s[0] != '$') return false;
  return std::all_of(s.begin() + 1, s.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

namespace detail {

// `/body/flags` -> `RegExp("body", "flags")`, the spelling the canonical
// form uses for regex literals.
inline std::string regex_atom(const std::string& raw) {
  std::size_t close = raw.rfind('/');
  std::string body = raw.substr(1, close - 1);
  std::string flags = raw.substr(close + 1);
  std::string out = "RegExp(\"" + body + "\"";
  if (!flags.empty()) out += ", \"" + flags + "\"";
  out += ")";
  return out;
}

}  // namespace detail

class Canonicalizer {
 public:
  CanonicalProgram run(const Node& program) {
    out_ = CanonicalProgram{};
    temp_count_ = 0;
    queue_.clear();

    bool top_level_has_code = false;
    for (const auto& s : program.kids) {
      if (s->kind != NodeKind::Function && s->kind != NodeKind::Empty) {
        top_level_has_code = true;
        break;
      }
    }
    Ctx top;
    ctx_ = &top;
    if (top_level_has_code) {
      lower_unit_body(program.kids);
    } else {
      for (const auto& s : program.kids)
        if (s->kind == NodeKind::Function) declare_function(*s);
    }
    while (!queue_.empty()) {
      const Node* fn = queue_.front();
      queue_.pop_front();
      Ctx fctx;
      ctx_ = &fctx;
      for (const auto& p : fn->kids[0]->kids) rename(p->text);
      lower_unit_body(fn->kids[1]->kids);
    }
    ctx_ = nullptr;
    out_.temp_count = temp_count_;
    return out_;
  }

 private:
  struct Ctx {
    std::unordered_map<std::string, std::string> rename;
    int next_v = 0;
  };

  struct Atom {
    std::string text;
    std::string name;  // non-empty when the atom is a readable name
  };

  CanonicalProgram out_;
  int temp_count_ = 0;
  std::vector<int> guards_;
  std::deque<const Node*> queue_;
  Ctx* ctx_ = nullptr;

  std::string fresh_temp() { return "$" + std::to_string(temp_count_++); }
  std::string fresh_slot() { return "v" + std::to_string(ctx_->next_v++); }

  std::string rename(const std::string& name) {
    if (reserved_globals().count(name)) return name;
    auto it = ctx_->rename.find(name);
    if (it != ctx_->rename.end()) return it->second;
    std::string v = fresh_slot();
    ctx_->rename.emplace(name, v);
    return v;
  }

  void declare_function(const Node& fn) {
    if (!fn.text.empty()) rename(fn.text);
    queue_.push_back(&fn);
  }

  int emit(StmtKind k, std::string text, std::vector<std::string> reads = {},
           std::vector<std::string> writes = {}) {
    CanonicalStmt s;
    s.kind = k;
    s.text = std::move(text);
    auto clean = [](std::vector<std::string>& v) {
      v.erase(std::remove_if(v.begin(), v.end(),
                             [](const std::string& s) { return s.empty(); }),
              v.end());
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    clean(reads);
    clean(writes);
    s.reads = std::move(reads);
    s.writes = std::move(writes);
    s.guard = guards_.empty() ? -1 : guards_.back();
    out_.statements.push_back(std::move(s));
    return static_cast<int>(out_.statements.size()) - 1;
  }

  Atom store(const std::string* target, std::string rhs, std::vector<std::string> reads) {
    std::string t = target ? *target : fresh_temp();
    emit(StmtKind::Assign, t + " = " + rhs, std::move(reads), {t});
    return {t, t};
  }

  void lower_unit_body(const std::vector<NodePtr>& stmts) {
    emit(StmtKind::Begin, "begin");
    for (const auto& s : stmts) lower_stmt(*s);
    emit(StmtKind::End, "end");
  }

  // ----- statements -----

  void lower_stmt(const Node& s) {
    switch (s.kind) {
      case NodeKind::Block:
        for (const auto& c : s.kids) lower_stmt(*c);
        return;
      case NodeKind::Empty:
        return;
      case NodeKind::Skipped:
        emit(StmtKind::Skip, "skip");
        return;
      case NodeKind::Function:
        declare_function(s);
        return;
      case NodeKind::VarDecl:
        lower_var_decl(s);
        return;
      case NodeKind::ExprStmt:
        lower_expr_stmt(*s.kids[0]);
        return;
      case NodeKind::If:
        lower_if(s);
        return;
      case NodeKind::While:
        lower_while(s);
        return;
      case NodeKind::DoWhile:
        lower_do_while(s);
        return;
      case NodeKind::For:
        lower_for(s);
        return;
      case NodeKind::ForIn:
        lower_for_in(s);
        return;
      case NodeKind::Return: {
        if (s.kids.empty()) {
          emit(StmtKind::Return, "return");
        } else {
          Atom v = lower_expr(*s.kids[0]);
          emit(StmtKind::Return, "return " + v.text, {v.name});
        }
        return;
      }
      default:
        lower_expr(s);
        return;
    }
  }

  void lower_var_decl(const Node& decl) {
    for (const auto& d : decl.kids) {
      std::string v = rename(d->text);
      if (d->kids.empty()) {
        emit(StmtKind::Assign, v + " = undefined", {}, {v});
      } else {
        lower_expr(*d->kids[0], &v);
      }
    }
  }

  void lower_expr_stmt(const Node& e) {
    if (e.kind == NodeKind::Call) {
      lower_call(e, nullptr, /*as_statement=*/true);
      return;
    }
    lower_expr(e);
  }

  void lower_if(const Node& s) {
    Atom c = lower_expr(*s.kids[0]);
    int g = emit(StmtKind::GuardIf, "if(" + c.text + ")", {c.name});
    guards_.push_back(g);
    lower_stmt(*s.kids[1]);
    guards_.pop_back();
    if (s.kids.size() > 2) {
      Atom n = store(nullptr, "! " + c.text, {c.name});
      int g2 = emit(StmtKind::GuardIf, "if(" + n.text + ")", {n.name});
      guards_.push_back(g2);
      lower_stmt(*s.kids[2]);
      guards_.pop_back();
    }
  }

  // Loops follow the recompute-guard pattern: the condition value is bound
  // before the loop, the while guard reads it, and the body ends by
  // recomputing the same binding.
  void lower_loop(const Node& cond, const Node* body, const Node* step) {
    std::size_t before = out_.statements.size();
    Atom c = cond.kind == NodeKind::Empty ? Atom{"true", ""} : lower_expr(cond);
    bool cond_emitted = out_.statements.size() > before;
    int g = emit(StmtKind::GuardWhile, "while(" + c.text + ")", {c.name});
    guards_.push_back(g);
    if (body) lower_stmt(*body);
    if (step) lower_expr_stmt(*step);
    if (cond_emitted) {
      if (is_temp_name(c.name))
        lower_expr(cond, &c.name);
      else
        lower_expr(cond);
    }
    guards_.pop_back();
  }

  void lower_while(const Node& s) { lower_loop(*s.kids[0], s.kids[1].get(), nullptr); }

  void lower_do_while(const Node& s) {
    Atom g = store(nullptr, "true", {});
    int gi = emit(StmtKind::GuardWhile, "while(" + g.text + ")", {g.name});
    guards_.push_back(gi);
    lower_stmt(*s.kids[0]);
    lower_expr(*s.kids[1], &g.name);
    guards_.pop_back();
  }

  void lower_for(const Node& s) {
    if (s.kids[0]->kind == NodeKind::VarDecl)
      lower_var_decl(*s.kids[0]);
    else if (s.kids[0]->kind == NodeKind::ExprStmt)
      lower_expr_stmt(*s.kids[0]->kids[0]);
    const Node* step = s.kids[2]->kind == NodeKind::Empty ? nullptr : s.kids[2].get();
    lower_loop(*s.kids[1], s.kids[3].get(), step);
  }

  void lower_for_in(const Node& s) {
    std::string key;
    const Node& head = *s.kids[0];
    if (head.kind == NodeKind::VarDecl && head.kids.size() == 1 &&
        head.kids[0]->kids.empty()) {
      key = rename(head.kids[0]->text);
    } else if (head.kind == NodeKind::ExprStmt &&
               head.kids[0]->kind == NodeKind::Identifier) {
      key = rename(head.kids[0]->text);
    } else {
      emit(StmtKind::Skip, "skip");
      return;
    }
    Atom obj = lower_expr(*s.kids[1]);
    Atom g = store(nullptr, key + " in " + obj.text, {key, obj.name});
    int gi = emit(StmtKind::GuardWhile, "while(" + g.text + ")", {g.name});
    guards_.push_back(gi);
    lower_stmt(*s.kids[2]);
    Atom obj2 = lower_expr(*s.kids[1]);
    store(&g.name, key + " in " + obj2.text, {key, obj2.name});
    guards_.pop_back();
  }

  // ----- expressions -----

  Atom lower_expr(const Node& e, const std::string* target = nullptr) {
    switch (e.kind) {
      case NodeKind::Identifier: {
        std::string n = rename(e.text);
        if (target) return store(target, n, {n});
        return {n, n};
      }
      case NodeKind::Literal: {
        std::string text = e.text;
        if (!text.empty() && text[0] == '/') text = detail::regex_atom(text);
        std::string name = e.text == "this" ? "this" : "";
        if (target) return store(target, text, {name});
        return {text, name};
      }
      case NodeKind::Function:
        declare_function(e);
        if (target) return store(target, "function", {});
        return {"function", ""};
      case NodeKind::Binary:
        return lower_binary(e, target);
      case NodeKind::Unary: {
        Atom a = lower_expr(*e.kids[0]);
        return store(target, e.text + " " + a.text, {a.name});
      }
      case NodeKind::Update:
        return lower_update(e, target);
      case NodeKind::Assign:
        return lower_assign(e, target);
      case NodeKind::Conditional:
        return lower_conditional(e, target);
      case NodeKind::Call:
        return lower_call(e, target, false);
      case NodeKind::New:
        return lower_new(e, target);
      case NodeKind::Member: {
        Atom obj = lower_expr(*e.kids[0]);
        return store(target, obj.text + "." + e.text, {obj.name});
      }
      case NodeKind::Index: {
        Atom obj = lower_expr(*e.kids[0]);
        Atom key = lower_expr(*e.kids[1]);
        return store(target, obj.text + "[" + key.text + "]", {obj.name, key.name});
      }
      case NodeKind::Object: {
        std::string text = "{";
        std::vector<std::string> reads;
        for (std::size_t i = 0; i < e.kids.size(); ++i) {
          Atom v = lower_expr(*e.kids[i]->kids[0]);
          reads.push_back(v.name);
          text += (i ? ", " : " ") + e.kids[i]->text + ": " + v.text;
        }
        text += e.kids.empty() ? "}" : " }";
        return store(target, text, std::move(reads));
      }
      case NodeKind::Array: {
        std::string text = "[";
        std::vector<std::string> reads;
        for (std::size_t i = 0; i < e.kids.size(); ++i) {
          Atom v = lower_expr(*e.kids[i]);
          reads.push_back(v.name);
          text += (i ? ", " : " ") + v.text;
        }
        text += e.kids.empty() ? "]" : " ]";
        return store(target, text, std::move(reads));
      }
      case NodeKind::Skipped:
        emit(StmtKind::Skip, "skip");
        if (target) return store(target, "undefined", {});
        return {"undefined", ""};
      default:
        emit(StmtKind::Skip, "skip");
        return {"undefined", ""};
    }
  }

  Atom lower_binary(const Node& e, const std::string* target) {
    const std::string& op = e.text;
    if (op == ",") {
      lower_expr(*e.kids[0]);
      return lower_expr(*e.kids[1], target);
    }
    if (op == "&&") {
      std::string slot = target ? *target : fresh_temp();
      lower_expr(*e.kids[0], &slot);
      int g = emit(StmtKind::GuardIf, "if(" + slot + ")", {slot});
      guards_.push_back(g);
      lower_expr(*e.kids[1], &slot);
      guards_.pop_back();
      return {slot, slot};
    }
    if (op == "||") {
      std::string slot = target ? *target : fresh_temp();
      lower_expr(*e.kids[0], &slot);
      Atom n = store(nullptr, "! " + slot, {slot});
      int g = emit(StmtKind::GuardIf, "if(" + n.text + ")", {n.name});
      guards_.push_back(g);
      lower_expr(*e.kids[1], &slot);
      guards_.pop_back();
      return {slot, slot};
    }
    // Loose equality reads as strict in the canonical form.
    std::string norm = op == "==" ? "===" : op == "!=" ? "!==" : op;
    Atom a = lower_expr(*e.kids[0]);
    Atom b = lower_expr(*e.kids[1]);
    return store(target, a.text + " " + norm + " " + b.text, {a.name, b.name});
  }

  Atom lower_conditional(const Node& e, const std::string* target) {
    std::string slot = target ? *target : fresh_slot();
    Atom c = lower_expr(*e.kids[0]);
    int g = emit(StmtKind::GuardIf, "if(" + c.text + ")", {c.name});
    guards_.push_back(g);
    lower_expr(*e.kids[1], &slot);
    guards_.pop_back();
    Atom n = store(nullptr, "! " + c.text, {c.name});
    int g2 = emit(StmtKind::GuardIf, "if(" + n.text + ")", {n.name});
    guards_.push_back(g2);
    lower_expr(*e.kids[2], &slot);
    guards_.pop_back();
    return {slot, slot};
  }

  Atom lower_update(const Node& e, const std::string* target) {
    const Node& operand = *e.kids[0];
    std::string delta = e.text == "++" ? " + 1" : " - 1";
    if (operand.kind == NodeKind::Identifier) {
      std::string n = rename(operand.text);
      if (e.prefix) {
        emit(StmtKind::Assign, n + " = " + n + delta, {n}, {n});
        if (target) return store(target, n, {n});
        return {n, n};
      }
      Atom old = store(nullptr, n, {n});
      emit(StmtKind::Assign, n + " = " + n + delta, {n}, {n});
      if (target) return store(target, old.text, {old.name});
      return old;
    }
    if (operand.kind == NodeKind::Member || operand.kind == NodeKind::Index) {
      Atom loaded = lower_expr(operand);
      Atom updated = store(nullptr, loaded.text + delta, {loaded.name});
      store_into(operand, updated);
      Atom result = e.prefix ? updated : loaded;
      if (target) return store(target, result.text, {result.name});
      return result;
    }
    emit(StmtKind::Skip, "skip");
    return {"undefined", ""};
  }

  // Assignment to a member/index target re-lowers only the container side;
  // the updated root counts as written for dependency purposes.
  void store_into(const Node& lhs, const Atom& value) {
    if (lhs.kind == NodeKind::Member) {
      Atom obj = lower_expr(*lhs.kids[0]);
      emit(StmtKind::Assign, obj.text + "." + lhs.text + " = " + value.text,
           {obj.name, value.name}, {obj.name});
      return;
    }
    Atom obj = lower_expr(*lhs.kids[0]);
    Atom key = lower_expr(*lhs.kids[1]);
    emit(StmtKind::Assign, obj.text + "[" + key.text + "] = " + value.text,
         {obj.name, key.name, value.name}, {obj.name});
  }

  Atom lower_assign(const Node& e, const std::string* target) {
    const Node& lhs = *e.kids[0];
    const Node& rhs = *e.kids[1];
    std::string op = e.text;
    Atom result{"undefined", ""};
    if (lhs.kind == NodeKind::Identifier) {
      std::string n = rename(lhs.text);
      if (op == "=") {
        result = lower_expr(rhs, &n);
      } else {
        Atom v = lower_expr(rhs);
        std::string binop = op.substr(0, op.size() - 1);
        if (binop == "==") binop = "===";
        emit(StmtKind::Assign, n + " = " + n + " " + binop + " " + v.text,
             {n, v.name}, {n});
        result = {n, n};
      }
    } else if (lhs.kind == NodeKind::Member || lhs.kind == NodeKind::Index) {
      if (op == "=") {
        Atom v = lower_expr(rhs);
        store_into(lhs, v);
        result = v;
      } else {
        Atom loaded = lower_expr(lhs);
        Atom v = lower_expr(rhs);
        std::string binop = op.substr(0, op.size() - 1);
        Atom updated = store(nullptr, loaded.text + " " + binop + " " + v.text,
                             {loaded.name, v.name});
        store_into(lhs, updated);
        result = updated;
      }
    } else {
      emit(StmtKind::Skip, "skip");
    }
    if (target) return store(target, result.text, {result.name});
    return result;
  }

  Atom lower_call(const Node& e, const std::string* target, bool as_statement) {
    const Node& callee = *e.kids[0];
    std::string repr;
    std::vector<std::string> reads;
    std::string receiver;
    if (callee.kind == NodeKind::Member) {
      Atom obj = lower_expr(*callee.kids[0]);
      repr = obj.text + "." + callee.text;
      receiver = obj.name;
      reads.push_back(obj.name);
    } else {
      Atom f = lower_expr(callee);
      repr = f.text;
      reads.push_back(f.name);
    }
    std::string args;
    for (std::size_t i = 1; i < e.kids.size(); ++i) {
      Atom a = lower_expr(*e.kids[i]);
      reads.push_back(a.name);
      args += (i > 1 ? ", " : "") + a.text;
    }
    std::string text = repr + "(" + args + ")";
    if (as_statement && !target) {
      std::vector<std::string> writes;
      if (!receiver.empty()) writes.push_back(receiver);
      emit(StmtKind::Call, text, std::move(reads), std::move(writes));
      return {"undefined", ""};
    }
    return store(target, text, std::move(reads));
  }

  Atom lower_new(const Node& e, const std::string* target) {
    const Node& callee = *e.kids[0];
    std::string repr;
    std::vector<std::string> reads;
    if (callee.kind == NodeKind::Member) {
      Atom obj = lower_expr(*callee.kids[0]);
      repr = obj.text + "." + callee.text;
      reads.push_back(obj.name);
    } else {
      Atom f = lower_expr(callee);
      repr = f.text;
      reads.push_back(f.name);
    }
    std::string args;
    for (std::size_t i = 1; i < e.kids.size(); ++i) {
      Atom a = lower_expr(*e.kids[i]);
      reads.push_back(a.name);
      args += (i > 1 ? ", " : "") + a.text;
    }
    return store(target, "new " + repr + "(" + args + ")", std::move(reads));
  }
};

inline CanonicalProgram canonicalize(const Node& program) {
  return Canonicalizer().run(program);
}

inline CanonicalProgram canonicalize_source(std::string_view source) {
  auto ast = parse_source(source);
  return canonicalize(*ast);
}

// One statement per line, `text;`. Splitting on '\n' and stripping the
// trailing ';' recovers the statement texts.
inline std::string emit(const CanonicalProgram& canon) {
  std::string out;
  for (const auto& s : canon.statements) {
    out += s.text;
    out += ";\n";
  }
  return out;
}

}  // namespace jstrack
