#pragma once

#include <memory>
#include <string>
#include <vector>

namespace jstrack {

enum class NodeKind {
  Program,
  Function,     // text = name ("" for anonymous); kids = [params Block, body Block]
  VarDecl,      // kids = Declarator*
  Declarator,   // text = name; kids = [init?]
  Assign,       // text = "=" or compound op; kids = [target, value]
  Binary,       // text = operator
  Unary,        // text = operator
  Update,       // text = "++" or "--"; prefix flag in text2
  Call,         // kids = [callee, arg*]
  New,          // kids = [callee, arg*]
  Member,       // text = property name; kids = [object]
  Index,        // kids = [object, key]
  Literal,      // text = raw spelling
  Identifier,   // text = name
  If,           // kids = [cond, then, else?]
  While,        // kids = [cond, body]
  DoWhile,      // kids = [body, cond]
  For,          // kids = [init?, cond?, step?, body]; absent parts are Empty
  ForIn,        // kids = [var-or-name, object, body]
  Return,       // kids = [value?]
  Block,
  ExprStmt,
  Object,       // kids = Property*
  Property,     // text = key; kids = [value]
  Array,
  Conditional,  // kids = [cond, then, else]
  Skipped,      // unsupported construct, carried as an opaque marker
  Empty,
};

struct Node {
  NodeKind kind;
  std::string text;
  int line = 1;
  bool prefix = false;  // Update nodes only
  std::vector<std::unique_ptr<Node>> kids;

  Node(NodeKind k, std::string t = "", int ln = 1)
      : kind(k), text(std::move(t)), line(ln) {}

  Node* add(std::unique_ptr<Node> child) {
    kids.push_back(std::move(child));
    return kids.back().get();
  }
};

using NodePtr = std::unique_ptr<Node>;

inline NodePtr make_node(NodeKind k, std::string text = "", int line = 1) {
  return std::make_unique<Node>(k, std::move(text), line);
}

inline bool contains_kind(const Node& n, NodeKind k) {
  if (n.kind == k) return true;
  for (const auto& c : n.kids)
    if (contains_kind(*c, k)) return true;
  return false;
}

}  // namespace jstrack
