#include "jstrack/canon.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "support/mangle.hpp"

using namespace jstrack;

namespace {

std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(JSTRACK_FIXTURE_DIR) + "/" + name);
  EXPECT_TRUE(in.good()) << name;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kEqualTest =
    "function equalTest(a, b){\n"
    "  if(a == b){\n"
    "    return true;}\n"
    "  return false;}\n";

TEST(Canon, EqualTestGolden) {
  auto canon = canonicalize_source(kEqualTest);
  EXPECT_EQ(emit(canon),
            "begin;\n"
            "$0 = v0 === v1;\n"
            "if($0);\n"
            "return true;\n"
            "return false;\n"
            "end;\n");
  EXPECT_EQ(canon.temp_count, 1);
  ASSERT_EQ(canon.statements.size(), 6u);
  EXPECT_EQ(canon.statements[0].kind, StmtKind::Begin);
  EXPECT_EQ(canon.statements[2].kind, StmtKind::GuardIf);
  EXPECT_EQ(canon.statements[3].guard, 2);   // return true sits under if($0)
  EXPECT_EQ(canon.statements[4].guard, -1);  // return false does not
  EXPECT_EQ(canon.statements[5].kind, StmtKind::End);
}

TEST(Canon, DeclarationWithoutInit) {
  auto canon = canonicalize_source("var a;");
  EXPECT_EQ(emit(canon), "begin;\nv0 = undefined;\nend;\n");
}

TEST(Canon, EmptyProgram) {
  auto canon = canonicalize_source("");
  EXPECT_TRUE(canon.statements.empty());
  EXPECT_EQ(emit(canon), "");
}

TEST(Canon, CriteoMatchesItsObfuscatedTwin) {
  auto orig = canonicalize_source(read_fixture("criteo.js"));
  auto obfs = canonicalize_source(read_fixture("criteo_obfuscated.js"));
  EXPECT_EQ(emit(orig), emit(obfs));
  EXPECT_EQ(orig.temp_count, 14);  // $0 .. $13, as in the function body
}

TEST(Canon, CriteoLoopRecomputePattern) {
  std::string text = emit(canonicalize_source(read_fixture("criteo.js")));
  EXPECT_NE(text.find("$0 = document.cookie;"), std::string::npos);
  EXPECT_NE(text.find("= $0.split(\";\");"), std::string::npos);
  EXPECT_NE(text.find("while($2);"), std::string::npos);
  EXPECT_NE(text.find("$12 = v1;\nv1 = v1 + 1;"), std::string::npos);
  // condition recomputed into the same guard temporary at the body end
  EXPECT_NE(text.find("$13 = v4.length;\n$2 = v1 < $13;"), std::string::npos);
  EXPECT_NE(text.find("v2.replace(RegExp(\"^\\s+|\\s+$\", \"g\"), \"\")"),
            std::string::npos);
  EXPECT_NE(text.find("$11 = unescape(v3);\nreturn $11;"), std::string::npos);
}

TEST(Canon, ForAndWhileConverge) {
  auto a = canonicalize_source("i = 0; for(; i < n; i++) { f(i); }");
  auto b = canonicalize_source("i = 0; while(i < n) { f(i); i++; }");
  EXPECT_EQ(emit(a), emit(b));
}

TEST(Canon, ReservedRootsKeepTheirNames) {
  std::string text = emit(canonicalize_source("var c = document.cookie; window.x = c;"));
  EXPECT_EQ(text,
            "begin;\n"
            "v0 = document.cookie;\n"
            "window.x = v0;\n"
            "end;\n");
}

TEST(Canon, ShortCircuitAnd) {
  std::string text = emit(canonicalize_source("x = a && b;"));
  EXPECT_EQ(text,
            "begin;\n"
            "v0 = v1;\n"
            "if(v0);\n"
            "v0 = v2;\n"
            "end;\n");
}

TEST(Canon, ShortCircuitOr) {
  std::string text = emit(canonicalize_source("x = a || [];"));
  EXPECT_EQ(text,
            "begin;\n"
            "v0 = v1;\n"
            "$0 = ! v0;\n"
            "if($0);\n"
            "v0 = [];\n"
            "end;\n");
}

TEST(Canon, ConditionalLowersToGuards) {
  std::string text = emit(canonicalize_source("x = a ? b : c;"));
  EXPECT_EQ(text,
            "begin;\n"
            "if(v1);\n"
            "v0 = v2;\n"
            "$0 = ! v1;\n"
            "if($0);\n"
            "v0 = v3;\n"
            "end;\n");
}

TEST(Canon, PostfixIncrementKeepsOldValueTemp) {
  std::string text = emit(canonicalize_source("i++;"));
  EXPECT_EQ(text,
            "begin;\n"
            "$0 = v0;\n"
            "v0 = v0 + 1;\n"
            "end;\n");
}

TEST(Canon, FunctionExpressionIsAnAtom) {
  std::string text = emit(canonicalize_source("var f = function(){ return 1; }; f();"));
  EXPECT_EQ(text,
            "begin;\n"
            "v0 = function;\n"
            "v0();\n"
            "end;\n"
            "begin;\n"
            "return 1;\n"
            "end;\n");
}

TEST(Canon, TopLevelUnitComesBeforeFunctionUnits) {
  std::string text = emit(canonicalize_source(read_fixture("criteo.js")));
  EXPECT_EQ(text.find("v0 = \"1822\";"), std::string("begin;\n").size());
}

TEST(Canon, SkippedStatementsLowerToSkip) {
  std::string text = emit(canonicalize_source("var a = 1; class F {} var b = 2;"));
  EXPECT_EQ(text,
            "begin;\n"
            "v0 = 1;\n"
            "skip;\n"
            "v1 = 2;\n"
            "end;\n");
}

TEST(Canon, ObjectLiteralPreservesKeys) {
  std::string text = emit(canonicalize_source("x = { createCookie: f, 'k': 2 };"));
  EXPECT_NE(text.find("v0 = { createCookie: v1, 'k': 2 };"), std::string::npos);
}

TEST(Canon, NewExpression) {
  std::string text = emit(canonicalize_source("var d = new Date();"));
  EXPECT_EQ(text, "begin;\nv0 = new Date();\nend;\n");
}

// Obfuscation invariance: consistent renaming plus arbitrary whitespace
// leaves the emission byte-identical.
TEST(Canon, InvarianceUnderMangling) {
  const std::string fixtures[] = {"criteo.js", "criteo_obfuscated.js"};
  for (const auto& f : fixtures) {
    std::string src = read_fixture(f);
    std::string base = emit(canonicalize_source(src));
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      std::string mangled = testsupport::mangle(src, seed);
      EXPECT_EQ(emit(canonicalize_source(mangled)), base) << f << " seed " << seed;
    }
  }
}

// No emitted line may contain two binary operators outside string/regex
// literals; re-lexing each line and counting operator tokens checks this.
TEST(Canon, SingleOperationPerLine) {
  static const std::unordered_set<std::string> binops = {
      "+",  "-",  "*",  "/",  "%",  "==", "===", "!=", "!==", "<",  ">",
      "<=", ">=", "&&", "||", "&",  "|",  "^",   "<<", ">>",  ">>>"};
  std::string src = read_fixture("criteo.js") + read_fixture("criteo_obfuscated.js");
  auto canon = canonicalize_source(src);
  for (const auto& s : canon.statements) {
    int count = 0;
    for (const auto& t : lex(s.text)) {
      if (t.kind == TokenKind::Punctuator && binops.count(t.text)) ++count;
      if (t.is_keyword("in") || t.is_keyword("instanceof")) ++count;
    }
    EXPECT_LE(count, 1) << s.text;
  }
}

// Every temporary is written exactly once before its first read; loop-guard
// recomputes are the only rewrites and happen after the guard has read it.
TEST(Canon, TemporaryFreshness) {
  const char* sources[] = {
      "x = a ? b + 1 : c; while (i < n.length) { i++; } do { f(); } while (g());",
      "for (var k in o) { o[k] = k; } y = a || b && c;",
  };
  for (const char* src : sources) {
    auto canon = canonicalize_source(src);
    std::unordered_map<std::string, int> writes_seen;
    std::unordered_map<std::string, bool> read_seen;
    for (const auto& s : canon.statements) {
      for (const auto& r : s.reads) {
        if (is_temp_name(r) && !read_seen[r])
          EXPECT_EQ(writes_seen[r], 1) << r << " in " << src;
        read_seen[r] = true;
      }
      for (const auto& w : s.writes)
        if (is_temp_name(w)) ++writes_seen[w];
    }
  }
}

TEST(Canon, Deterministic) {
  std::string src = read_fixture("criteo.js");
  EXPECT_EQ(emit(canonicalize_source(src)), emit(canonicalize_source(src)));
}

}  // namespace
