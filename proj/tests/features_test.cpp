#include "jstrack/features.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "jstrack/features_io.hpp"
#include "support/mangle.hpp"

using namespace jstrack;

namespace {

using Corpus = std::vector<std::set<std::string>>;

// Dense brute-force tf-idf: weight(doc, t) = [t in doc] * ln(N / df(t)).
std::map<std::string, double> dense_tfidf(const Corpus& corpus, std::size_t doc) {
  std::map<std::string, double> df;
  for (const auto& d : corpus)
    for (const auto& t : d) df[t] += 1.0;
  std::map<std::string, double> row;
  for (const auto& [t, count] : df) {
    double w = corpus[doc].count(t)
                   ? std::log(static_cast<double>(corpus.size()) / count)
                   : 0.0;
    row[t] = w;
  }
  return row;
}

TEST(Terms, SyntacticThreeLines) {
  auto terms = syntactic_terms("a();\nb();\nc();\n");
  EXPECT_EQ(terms.size(), 3u);
}

TEST(Terms, SequentialTruncatedWindowAtStart) {
  // canonical form of "a();" is [begin; v0(); end]
  auto canon = canonicalize_source("a();");
  auto terms = extract_terms(canon, nullptr, FeatureModelSpec::sequential(2));
  ASSERT_EQ(terms.size(), 3u);
  EXPECT_EQ(terms[0], "begin");
  EXPECT_EQ(terms[1], "begin⇐v0()");
  EXPECT_EQ(terms[2], "v0()⇐end");
}

TEST(Terms, SequentialSevenGramEqualTest) {
  auto canon = canonicalize_source(
      "function equalTest(a, b){ if(a == b){ return true;} return false;}");
  auto terms = extract_terms(canon, nullptr, FeatureModelSpec::sequential(7));
  ASSERT_EQ(terms.size(), 6u);
  // windowing oracle over the emitted lines
  std::vector<std::string> lines;
  for (const auto& s : canon.statements) lines.push_back(s.text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string expect;
    std::size_t start = i + 1 >= 7 ? i - 5 : 0;
    for (std::size_t j = start; j <= i; ++j)
      expect += (j > start ? "⇐" : "") + lines[j];
    EXPECT_EQ(terms[i], expect);
  }
}

TEST(Terms, MarkerSwitch) {
  auto canon = canonicalize_source("a();");
  FeatureModelSpec spec = FeatureModelSpec::sequential(2);
  spec.include_markers = false;
  auto terms = extract_terms(canon, nullptr, spec);
  ASSERT_EQ(terms.size(), 1u);
  EXPECT_EQ(terms[0], "v0()");
}

TEST(Terms, PdgNgramUsesBackwardPaths) {
  auto canon = canonicalize_source("x = 1; y = x;");
  auto g = build_pdg(canon);
  auto terms = extract_terms(canon, &g, FeatureModelSpec::pdg(2));
  ASSERT_EQ(terms.size(), 4u);
  EXPECT_EQ(terms[2], "v1 = v0⇐v0 = 1");
}

TEST(Vocabulary, UbiquitousTermHasZeroIdf) {
  Corpus corpus = {{"common", "a"}, {"common", "b"}, {"common"}};
  auto vocab = fit_vocabulary(corpus, FeatureModelSpec::sequential(4));
  int idx = vocab.index_of("common");
  ASSERT_GE(idx, 0);
  EXPECT_EQ(vocab.idf[static_cast<std::size_t>(idx)], 0.0);
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    auto v = vectorize(corpus[d], vocab);
    for (const auto& e : v.entries)
      EXPECT_NE(vocab.terms[e.index], "common");
  }
}

TEST(Vocabulary, IdfOfRareTerm) {
  Corpus corpus = {{"rare", "x"}, {"x"}, {"x"}, {"x"}};
  auto vocab = fit_vocabulary(corpus, FeatureModelSpec::sequential(4));
  int idx = vocab.index_of("rare");
  ASSERT_GE(idx, 0);
  EXPECT_DOUBLE_EQ(vocab.idf[static_cast<std::size_t>(idx)], std::log(4.0));
}

TEST(Vocabulary, EmptyCorpusThrows) {
  EXPECT_THROW(fit_vocabulary({}, FeatureModelSpec::sequential(4)), EmptyCorpusError);
}

TEST(Vocabulary, CapMatchesExhaustiveRanking) {
  SplitMix64 rng(7);
  Corpus corpus;
  for (int d = 0; d < 10; ++d) {
    std::set<std::string> doc;
    for (int t = 0; t < 12; ++t)
      if (rng.below(3) == 0) doc.insert("t" + std::to_string(t));
    doc.insert("t" + std::to_string(d % 12));
    corpus.push_back(doc);
  }
  FeatureModelSpec spec = FeatureModelSpec::syntactic(3);
  auto vocab = fit_vocabulary(corpus, spec);
  ASSERT_EQ(vocab.terms.size(), 3u);

  // independent score-and-sort
  std::map<std::string, double> df;
  for (const auto& d : corpus)
    for (const auto& t : d) df[t] += 1;
  std::vector<std::pair<double, std::string>> scored;
  for (const auto& [t, n] : df)
    scored.push_back({-(n * std::log(10.0 / n)), t});
  std::sort(scored.begin(), scored.end());
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(vocab.terms[i], scored[i].second);
}

TEST(Vocabulary, CapLaw) {
  Corpus corpus = {{"a", "b"}, {"b", "c"}};
  FeatureModelSpec spec = FeatureModelSpec::syntactic(10);
  auto vocab = fit_vocabulary(corpus, spec);
  EXPECT_EQ(vocab.terms.size(), 3u);  // min(cap, distinct terms)
  spec.cap = 2;
  EXPECT_EQ(fit_vocabulary(corpus, spec).terms.size(), 2u);
}

TEST(Vectorize, MatchesDenseOracle) {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Corpus corpus;
    std::size_t docs = 2 + rng.below(8);
    for (std::size_t d = 0; d < docs; ++d) {
      std::set<std::string> doc;
      std::size_t nterms = 1 + rng.below(10);
      for (std::size_t t = 0; t < nterms; ++t)
        doc.insert("w" + std::to_string(rng.below(15)));
      corpus.push_back(doc);
    }
    auto vocab = fit_vocabulary(corpus, FeatureModelSpec::sequential(4));
    for (std::size_t d = 0; d < corpus.size(); ++d) {
      auto dense = dense_tfidf(corpus, d);
      auto sparse = vectorize(corpus[d], vocab, "doc");
      std::map<std::string, double> got;
      for (const auto& e : sparse.entries) got[vocab.terms[e.index]] = e.weight;
      for (const auto& [t, w] : dense) {
        double gw = got.count(t) ? got[t] : 0.0;
        EXPECT_NEAR(gw, w, 1e-12) << t;
      }
    }
  }
}

TEST(Vectorize, OutOfVocabularyDropped) {
  Corpus corpus = {{"a"}, {"b"}};
  auto vocab = fit_vocabulary(corpus, FeatureModelSpec::sequential(4));
  auto v = vectorize({"zzz", "qqq"}, vocab);
  EXPECT_TRUE(v.entries.empty());
}

TEST(Vectorize, BooleanTfLaw) {
  Corpus corpus = {{"a", "b", "c"}, {"b"}, {"c", "d"}};
  auto vocab = fit_vocabulary(corpus, FeatureModelSpec::sequential(4));
  for (const auto& doc : corpus) {
    auto v = vectorize(doc, vocab);
    for (const auto& e : v.entries)
      EXPECT_EQ(e.weight, vocab.idf[e.index]);
  }
}

TEST(Cosine, SelfSimilarityIsOne) {
  auto x = from_dense({1.0, 0.0, 2.0});
  EXPECT_DOUBLE_EQ(cosine(x, x), 1.0);
}

TEST(Cosine, DisjointSupportsGiveZero) {
  auto a = from_dense({1.0, 0.0, 0.0});
  auto b = from_dense({0.0, 2.0, 3.0});
  EXPECT_EQ(cosine(a, b), 0.0);
}

TEST(Cosine, ZeroNormGivesZero) {
  auto a = from_dense({});
  auto b = from_dense({1.0});
  EXPECT_EQ(cosine(a, b), 0.0);
}

TEST(Cosine, ScaleFree) {
  auto a = from_dense({1.0, 2.0, 3.0});
  auto b = from_dense({0.5, 0.1, 4.0});
  std::vector<double> scaled = {2.5, 5.0, 7.5};
  auto a2 = from_dense(scaled);
  EXPECT_NEAR(cosine(a, b), cosine(a2, b), 1e-15);
}

TEST(Cosine, VocabMismatchThrows) {
  auto a = from_dense({1.0}, "a", 1);
  auto b = from_dense({1.0}, "b", 2);
  EXPECT_THROW(cosine(a, b), VocabMismatchError);
}

// Obfuscation invariance lifts to semantic vectors.
TEST(Vectors, InvariantUnderRenaming) {
  std::string src =
      "var _gaq = _gaq || [];\n"
      "_gaq.push(['_setAccount', 'UA-1627489-1']);\n"
      "(function(){ var ga = document.createElement('script'); ga.async = true; })();";
  std::string mangled = testsupport::mangle(src, 99);
  for (auto spec : {FeatureModelSpec::sequential(4), FeatureModelSpec::pdg(4)}) {
    auto a = term_set(terms_for_source(src, spec));
    auto b = term_set(terms_for_source(mangled, spec));
    EXPECT_EQ(a, b) << spec.name();
    Corpus corpus = {a, {"other"}};
    auto vocab = fit_vocabulary(corpus, spec);
    auto va = vectorize(a, vocab);
    auto vb = vectorize(b, vocab);
    ASSERT_EQ(va.entries.size(), vb.entries.size());
    for (std::size_t i = 0; i < va.entries.size(); ++i) {
      EXPECT_EQ(va.entries[i].index, vb.entries[i].index);
      EXPECT_EQ(va.entries[i].weight, vb.entries[i].weight);
    }
  }
}

TEST(Cdf, SingleValue) {
  auto rows = cdf_of({0.4});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].value, 0.4);
  EXPECT_EQ(rows[0].fraction, 1.0);
}

TEST(Cdf, DuplicatesCollapse) {
  auto rows = cdf_of({0.5, 0.5});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].fraction, 1.0);
}

TEST(Cdf, IdenticalVectorsStepAtOne) {
  std::vector<FeatureVector> group = {from_dense({1, 2}), from_dense({1, 2}),
                                      from_dense({1, 2})};
  auto rows = similarity_cdf_within(group);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].value, 1.0, 1e-12);
}

TEST(Cdf, EmptyThrows) { EXPECT_THROW(cdf_of({}), EmptyInputError); }

TEST(VocabIo, RoundTripAndDeterminism) {
  Corpus corpus = {{"line a", "line\tb"}, {"line a", "multi\nline"}};
  auto vocab = fit_vocabulary(corpus, FeatureModelSpec::sequential(4));
  std::string text = write_vocabulary_text(vocab, std::nullopt);
  EXPECT_EQ(text, write_vocabulary_text(vocab, std::nullopt));
  std::istringstream in(text);
  auto loaded = read_vocabulary_text(in);
  EXPECT_EQ(loaded.terms, vocab.terms);
  EXPECT_EQ(loaded.idf, vocab.idf);
  EXPECT_EQ(loaded.corpus_size, vocab.corpus_size);
  EXPECT_EQ(loaded.fingerprint, vocab.fingerprint);
}

TEST(VocabIo, VersionMismatch) {
  std::istringstream in("jstrack-vocab v999\n");
  EXPECT_THROW(read_vocabulary_text(in), VersionMismatchError);
}

TEST(VectorIo, RoundTrip) {
  auto v = from_dense({0.5, 0.0, 1.25}, "prog-1", 42);
  auto parsed = parse_vector_line(write_vector_line(v), 42);
  EXPECT_EQ(parsed.program_id, "prog-1");
  ASSERT_EQ(parsed.entries.size(), v.entries.size());
  for (std::size_t i = 0; i < v.entries.size(); ++i) {
    EXPECT_EQ(parsed.entries[i].index, v.entries[i].index);
    EXPECT_EQ(parsed.entries[i].weight, v.entries[i].weight);
  }
}

}  // namespace
