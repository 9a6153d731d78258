#pragma once

#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "jstrack/common.hpp"

namespace jstrack {

enum class TokenKind { Identifier, Keyword, String, Number, Regex, Punctuator, Template };

struct Token {
  TokenKind kind;
  std::string text;
  int line = 1;

  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
  bool is_punct(std::string_view t) const { return is(TokenKind::Punctuator, t); }
  bool is_keyword(std::string_view t) const { return is(TokenKind::Keyword, t); }
};

inline const std::unordered_set<std::string>& js_keywords() {
  static const std::unordered_set<std::string> kw = {
      "break",    "case",     "catch",  "continue", "debugger", "default",
      "delete",   "do",       "else",   "false",    "finally",  "for",
      "function", "if",       "in",     "instanceof", "new",    "null",
      "return",   "switch",   "this",   "throw",    "true",     "try",
      "typeof",   "undefined", "var",   "void",     "while",    "with",
      "class",    "const",    "let",    "extends",  "super",    "export",
      "import",   "yield"};
  return kw;
}

// Longest-match punctuator table, longest first.
inline const std::vector<std::string>& js_punctuators() {
  static const std::vector<std::string> p = {
      ">>>=",
      "===", "!==", ">>>", "<<=", ">>=",
      "==", "!=", "<=", ">=", "&&", "||", "++", "--", "<<", ">>",
      "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "=>",
      "{", "}", "(", ")", "[", "]", ";", ",", "<", ">", "+", "-", "*", "/",
      "%", "&", "|", "^", "!", "~", "?", ":", "=", "."};
  return p;
}

namespace detail {

inline bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}
inline bool ident_part(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

// A '/' starts a regex literal unless the previous significant token can end
// an expression (then it is division).
inline bool regex_allowed(const Token* prev) {
  if (prev == nullptr) return true;
  switch (prev->kind) {
    case TokenKind::Identifier:
    case TokenKind::Number:
    case TokenKind::String:
    case TokenKind::Regex:
    case TokenKind::Template:
      return false;
    case TokenKind::Keyword:
      // `this`, `true` etc. end an expression; `return`, `typeof` etc. do not.
      return !(prev->text == "this" || prev->text == "true" || prev->text == "false" ||
               prev->text == "null" || prev->text == "undefined" || prev->text == "super");
    case TokenKind::Punctuator:
      return !(prev->text == ")" || prev->text == "]" || prev->text == "}" ||
               prev->text == "++" || prev->text == "--");
  }
  return true;
}

}  // namespace detail

// Full token stream for a source string. Comments and whitespace are dropped;
// tokens keep their raw spelling (strings include quotes, regexes include
// delimiters and flags).
inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = src.size();
  int line = 1;

  auto push = [&](TokenKind k, std::string text) {
    out.push_back(Token{k, std::move(text), line});
  };

  while (i < n) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '/') {
      while (i < n && src[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '*') {
      int start_line = line;
      i += 2;
      while (i + 1 < n && !(src[i] == '*' && src[i + 1] == '/')) {
        if (src[i] == '\n') ++line;
        ++i;
      }
      if (i + 1 >= n) throw LexError(start_line, "unterminated block comment");
      i += 2;
      continue;
    }
    if (detail::ident_start(c)) {
      std::size_t j = i + 1;
      while (j < n && detail::ident_part(src[j])) ++j;
      std::string word(src.substr(i, j - i));
      TokenKind kind = js_keywords().count(word) ? TokenKind::Keyword : TokenKind::Identifier;
      push(kind, std::move(word));
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      if (c == '0' && j + 1 < n && (src[j + 1] == 'x' || src[j + 1] == 'X')) {
        j += 2;
        while (j < n && std::isxdigit(static_cast<unsigned char>(src[j]))) ++j;
      } else {
        while (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        if (j < n && src[j] == '.') {
          ++j;
          while (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
        if (j < n && (src[j] == 'e' || src[j] == 'E')) {
          std::size_t k = j + 1;
          if (k < n && (src[k] == '+' || src[k] == '-')) ++k;
          if (k < n && std::isdigit(static_cast<unsigned char>(src[k]))) {
            j = k;
            while (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
          }
        }
      }
      push(TokenKind::Number, std::string(src.substr(i, j - i)));
      i = j;
      continue;
    }
    if (c == '"' || c == '\'') {
      std::size_t j = i + 1;
      while (j < n && src[j] != c) {
        if (src[j] == '\n') throw LexError(line, "unterminated string literal");
        if (src[j] == '\\' && j + 1 < n) ++j;
        ++j;
      }
      if (j >= n) throw LexError(line, "unterminated string literal");
      push(TokenKind::String, std::string(src.substr(i, j - i + 1)));
      i = j + 1;
      continue;
    }
    if (c == '`') {
      int start_line = line;
      std::size_t j = i + 1;
      while (j < n && src[j] != '`') {
        if (src[j] == '\n') ++line;
        if (src[j] == '\\' && j + 1 < n) ++j;
        ++j;
      }
      if (j >= n) throw LexError(start_line, "unterminated template literal");
      out.push_back(Token{TokenKind::Template, std::string(src.substr(i, j - i + 1)), start_line});
      i = j + 1;
      continue;
    }
    if (c == '/' && detail::regex_allowed(out.empty() ? nullptr : &out.back())) {
      std::size_t j = i + 1;
      bool in_class = false;
      while (j < n) {
        char d = src[j];
        if (d == '\n') throw LexError(line, "unterminated regular expression");
        if (d == '\\' && j + 1 < n) {
          j += 2;
          continue;
        }
        if (d == '[') in_class = true;
        else if (d == ']') in_class = false;
        else if (d == '/' && !in_class) break;
        ++j;
      }
      if (j >= n) throw LexError(line, "unterminated regular expression");
      ++j;  // past closing '/'
      while (j < n && detail::ident_part(src[j])) ++j;  // flags
      push(TokenKind::Regex, std::string(src.substr(i, j - i)));
      i = j;
      continue;
    }
    bool matched = false;
    for (const std::string& p : js_punctuators()) {
      if (src.compare(i, p.size(), p) == 0) {
        push(TokenKind::Punctuator, p);
        i += p.size();
        matched = true;
        break;
      }
    }
    if (!matched) throw LexError(line, std::string("illegal character '") + c + "'");
  }
  return out;
}

}  // namespace jstrack
