#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "jstrack/lexer.hpp"

namespace jstrack {

namespace detail {

inline bool no_space_before(const Token& prev, const Token& cur) {
  if (cur.kind != TokenKind::Punctuator) return false;
  const std::string& t = cur.text;
  if (t == ";" || t == "," || t == ")" || t == "]" || t == "(" || t == "[") return true;
  // `1 .x` must not re-lex as the float `1.`.
  if (t == ".") return prev.kind != TokenKind::Number;
  // Postfix ++/-- glue to their operand; elsewhere (e.g. `a + ++b`) the
  // space is load-bearing, since `+++` re-lexes differently.
  if (t == "++" || t == "--")
    return prev.kind == TokenKind::Identifier || prev.is_punct(")") || prev.is_punct("]");
  return false;
}

inline bool no_space_after(const Token& prev) {
  return prev.kind == TokenKind::Punctuator &&
         (prev.text == "(" || prev.text == "[" || prev.text == ".");
}

// Tokens that may stay on the same line as a closing brace.
inline bool glues_to_close_brace(const Token& t) {
  if (t.is_punct(";") || t.is_punct(",") || t.is_punct(")") || t.is_punct("]")) return true;
  return t.is_keyword("else") || t.is_keyword("while") || t.is_keyword("catch") ||
         t.is_keyword("finally");
}

}  // namespace detail

// Deterministic pretty-printer: re-emits the token stream one statement per
// line with single-space separation. Whitespace-only transform, so
// lex(unpack(s)) == lex(s) and unpack is idempotent.
inline std::string unpack(std::string_view source) {
  std::vector<Token> toks = lex(source);
  std::string out;
  std::string cur;
  int paren_depth = 0;
  bool after_close_brace = false;

  auto flush = [&]() {
    if (!cur.empty()) {
      out += cur;
      out += '\n';
      cur.clear();
    }
  };

  for (std::size_t i = 0; i < toks.size(); ++i) {
    const Token& t = toks[i];
    if (after_close_brace) {
      if (!detail::glues_to_close_brace(t)) flush();
      after_close_brace = false;
    }
    if (t.is_punct("}")) flush();
    if (!cur.empty()) {
      bool suppress = detail::no_space_before(i > 0 ? toks[i - 1] : t, t) ||
                      detail::no_space_after(toks[i - 1]);
      if (!suppress) cur += ' ';
    }
    cur += t.text;
    if (t.is_punct("(") || t.is_punct("[")) ++paren_depth;
    if (t.is_punct(")") || t.is_punct("]")) --paren_depth;
    if (t.is_punct(";") && paren_depth <= 0) {
      flush();
    } else if (t.is_punct("{")) {
      flush();
    } else if (t.is_punct("}")) {
      after_close_brace = true;
    }
  }
  flush();
  return out;
}

// Non-empty lines of unpacked source; these are the syntactic model's terms.
inline std::vector<std::string> unpacked_lines(std::string_view source) {
  std::string text = unpack(source);
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    if (end > start) lines.emplace_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

}  // namespace jstrack
