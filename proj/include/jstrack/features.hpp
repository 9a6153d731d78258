#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "jstrack/common.hpp"
#include "jstrack/pdg.hpp"
#include "jstrack/unpack.hpp"

namespace jstrack {

enum class FeatureModel { Syntactic, SequentialNgram, PdgNgram };

struct FeatureModelSpec {
  FeatureModel kind = FeatureModel::Syntactic;
  int n = 0;                       // gram length; unused for syntactic
  std::optional<int> cap;          // vocabulary cap; syntactic defaults to 200
  bool include_markers = true;     // whether begin/end lines act as terms

  static FeatureModelSpec syntactic(std::optional<int> cap = 200) {
    return {FeatureModel::Syntactic, 0, cap, true};
  }
  static FeatureModelSpec sequential(int n) {
    return {FeatureModel::SequentialNgram, n, std::nullopt, true};
  }
  static FeatureModelSpec pdg(int n) {
    return {FeatureModel::PdgNgram, n, std::nullopt, true};
  }

  std::string name() const {
    switch (kind) {
      case FeatureModel::Syntactic: return "syntactic";
      case FeatureModel::SequentialNgram: return "seq" + std::to_string(n);
      case FeatureModel::PdgNgram: return "pdg" + std::to_string(n);
    }
    return "?";
  }
};

// Parses the CLI spelling: syntactic | seqN | pdgN.
inline FeatureModelSpec parse_feature_spec(const std::string& name) {
  if (name == "syntactic") return FeatureModelSpec::syntactic();
  if (name.rfind("seq", 0) == 0) return FeatureModelSpec::sequential(std::stoi(name.substr(3)));
  if (name.rfind("pdg", 0) == 0) return FeatureModelSpec::pdg(std::stoi(name.substr(3)));
  throw DataError("unknown feature model: " + name);
}

struct TermVocabulary {
  std::vector<std::string> terms;  // rank order
  std::vector<double> idf;
  std::size_t corpus_size = 0;
  std::string model;               // spec name, recorded in the file header
  std::uint64_t fingerprint = 0;   // identity carried by vectors

  int index_of(const std::string& term) const {
    auto it = lookup_.find(term);
    return it == lookup_.end() ? -1 : it->second;
  }
  void rebuild_lookup() {
    lookup_.clear();
    for (std::size_t i = 0; i < terms.size(); ++i)
      lookup_.emplace(terms[i], static_cast<int>(i));
  }
  void fingerprint_from_contents() {
    std::string all = model + "#" + std::to_string(corpus_size);
    for (const auto& t : terms) all += "\x1f" + t;
    fingerprint = fnv1a64(all);
  }

 private:
  std::unordered_map<std::string, int> lookup_;
};

struct FeatureVector {
  struct Entry {
    std::uint32_t index;
    double weight;
  };
  std::vector<Entry> entries;  // strictly increasing index
  std::string program_id;
  std::uint64_t vocab_fingerprint = 0;

  double norm() const {
    double s = 0;
    for (const auto& e : entries) s += e.weight * e.weight;
    return std::sqrt(s);
  }
};

// ----- term extraction -----

// Terms of one program under a feature model. The syntactic model works on
// raw source (unpacked lines); the semantic models on the canonical form.
// Sequential n-gram terms join the n statements ending at each line;
// truncated windows at the start are kept. PDG n-gram terms serialize the
// backward-path set of each statement, paths sorted and joined.
inline std::vector<std::string> extract_terms(const CanonicalProgram& canon,
                                              const DependencyGraph* g,
                                              const FeatureModelSpec& spec) {
  std::vector<std::string> terms;
  std::vector<int> anchors;
  for (int i = 0; i < static_cast<int>(canon.statements.size()); ++i) {
    const auto k = canon.statements[static_cast<std::size_t>(i)].kind;
    if (!spec.include_markers && (k == StmtKind::Begin || k == StmtKind::End)) continue;
    anchors.push_back(i);
  }
  if (spec.kind == FeatureModel::SequentialNgram) {
    for (std::size_t i = 0; i < anchors.size(); ++i) {
      std::string term;
      std::size_t start = i + 1 >= static_cast<std::size_t>(spec.n)
                              ? i + 1 - static_cast<std::size_t>(spec.n)
                              : 0;
      for (std::size_t j = start; j <= i; ++j) {
        if (j > start) term += "⇐";
        term += canon.statements[static_cast<std::size_t>(anchors[j])].text;
      }
      terms.push_back(std::move(term));
    }
    return terms;
  }
  if (spec.kind == FeatureModel::PdgNgram) {
    if (g == nullptr) throw DataError("pdg n-gram extraction needs a dependency graph");
    for (int a : anchors) {
      auto set = backward_paths(*g, a, spec.n);
      std::vector<std::string> serialized;
      serialized.reserve(set.paths.size());
      for (const auto& p : set.paths) serialized.push_back(serialize_path(canon, p));
      std::sort(serialized.begin(), serialized.end());
      std::string term;
      for (std::size_t i = 0; i < serialized.size(); ++i) {
        if (i) term += "∥";
        term += serialized[i];
      }
      terms.push_back(std::move(term));
    }
    return terms;
  }
  throw DataError("extract_terms: syntactic model takes raw source, use syntactic_terms");
}

inline std::vector<std::string> syntactic_terms(std::string_view source) {
  return unpacked_lines(source);
}

// Convenience: full pipeline source -> term multiset for any model.
inline std::vector<std::string> terms_for_source(const std::string& source,
                                                 const FeatureModelSpec& spec) {
  if (spec.kind == FeatureModel::Syntactic) return syntactic_terms(source);
  auto canon = canonicalize_source(source);
  if (spec.kind == FeatureModel::PdgNgram) {
    auto g = build_pdg(canon);
    return extract_terms(canon, &g, spec);
  }
  return extract_terms(canon, nullptr, spec);
}

inline std::set<std::string> term_set(const std::vector<std::string>& terms) {
  return {terms.begin(), terms.end()};
}

// ----- vocabulary -----

// idf(t) = ln(|J| / df(t)). With a cap, terms rank by the corpus-wide sum of
// tf-idf, which under boolean tf is df * idf; ties break lexicographically.
inline TermVocabulary fit_vocabulary(const std::vector<std::set<std::string>>& corpus,
                                     const FeatureModelSpec& spec) {
  if (corpus.empty()) throw EmptyCorpusError();
  std::map<std::string, std::size_t> df;
  for (const auto& doc : corpus)
    for (const auto& t : doc) ++df[t];

  const double total = static_cast<double>(corpus.size());
  struct Ranked {
    double score;
    const std::string* term;
    double idf;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(df.size());
  for (const auto& [term, count] : df) {
    double idf = std::log(total / static_cast<double>(count));
    ranked.push_back({static_cast<double>(count) * idf, &term, idf});
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.score != b.score) return a.score > b.score;
    return *a.term < *b.term;
  });

  std::optional<int> cap = spec.cap;
  if (spec.kind == FeatureModel::Syntactic && !cap) cap = 200;
  std::size_t keep = ranked.size();
  if (cap && *cap >= 0) keep = std::min(keep, static_cast<std::size_t>(*cap));

  TermVocabulary vocab;
  vocab.corpus_size = corpus.size();
  vocab.model = spec.name();
  vocab.terms.reserve(keep);
  vocab.idf.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    vocab.terms.push_back(*ranked[i].term);
    vocab.idf.push_back(ranked[i].idf);
  }
  vocab.rebuild_lookup();
  vocab.fingerprint_from_contents();
  return vocab;
}

// ----- vectors -----

// Boolean tf: weight is exactly the idf of each present in-vocabulary term.
// Zero-idf terms (present in every fitting document) are omitted, matching
// the dense value of 0.
inline FeatureVector vectorize(const std::set<std::string>& terms,
                               const TermVocabulary& vocab,
                               std::string program_id = "") {
  std::vector<int> indices;
  for (const auto& t : terms) {
    int idx = vocab.index_of(t);
    if (idx >= 0 && vocab.idf[static_cast<std::size_t>(idx)] != 0.0) indices.push_back(idx);
  }
  std::sort(indices.begin(), indices.end());
  FeatureVector v;
  v.program_id = std::move(program_id);
  v.vocab_fingerprint = vocab.fingerprint;
  v.entries.reserve(indices.size());
  for (int idx : indices)
    v.entries.push_back({static_cast<std::uint32_t>(idx),
                         vocab.idf[static_cast<std::size_t>(idx)]});
  return v;
}

// Dense constructor, used for synthetic data and tests; zeros are dropped.
inline FeatureVector from_dense(const std::vector<double>& values,
                                std::string program_id = "",
                                std::uint64_t vocab_fingerprint = 1) {
  FeatureVector v;
  v.program_id = std::move(program_id);
  v.vocab_fingerprint = vocab_fingerprint;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] != 0.0) v.entries.push_back({static_cast<std::uint32_t>(i), values[i]});
  return v;
}

inline double dot(const FeatureVector& a, const FeatureVector& b) {
  double s = 0;
  std::size_t i = 0, j = 0;
  while (i < a.entries.size() && j < b.entries.size()) {
    if (a.entries[i].index < b.entries[j].index) ++i;
    else if (a.entries[i].index > b.entries[j].index) ++j;
    else s += a.entries[i++].weight * b.entries[j++].weight;
  }
  return s;
}

// Squared euclidean distance via a merge walk, exact 0 for identical vectors.
inline double squared_distance(const FeatureVector& a, const FeatureVector& b) {
  double s = 0;
  std::size_t i = 0, j = 0;
  while (i < a.entries.size() || j < b.entries.size()) {
    if (j >= b.entries.size() ||
        (i < a.entries.size() && a.entries[i].index < b.entries[j].index)) {
      s += a.entries[i].weight * a.entries[i].weight;
      ++i;
    } else if (i >= a.entries.size() || b.entries[j].index < a.entries[i].index) {
      s += b.entries[j].weight * b.entries[j].weight;
      ++j;
    } else {
      double d = a.entries[i].weight - b.entries[j].weight;
      s += d * d;
      ++i;
      ++j;
    }
  }
  return s;
}

inline void check_same_vocab(const FeatureVector& a, const FeatureVector& b) {
  if (a.vocab_fingerprint != b.vocab_fingerprint) throw VocabMismatchError();
}

inline double cosine(const FeatureVector& a, const FeatureVector& b) {
  check_same_vocab(a, b);
  double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

// ----- similarity CDF -----

struct CdfRow {
  double value;
  double fraction;  // fraction of observations <= value
};

inline std::vector<CdfRow> cdf_of(std::vector<double> values) {
  if (values.empty()) throw EmptyInputError();
  std::sort(values.begin(), values.end());
  std::vector<CdfRow> rows;
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
    rows.push_back({values[i], static_cast<double>(i + 1) / n});
  }
  return rows;
}

// Pairwise cosine CDF between two groups (cross product). For the
// within-group distribution pass the same group via similarity_cdf_within.
inline std::vector<CdfRow> similarity_cdf(const std::vector<FeatureVector>& a,
                                          const std::vector<FeatureVector>& b) {
  if (a.empty() || b.empty()) throw EmptyInputError();
  std::vector<double> values;
  values.reserve(a.size() * b.size());
  for (const auto& x : a)
    for (const auto& y : b) values.push_back(cosine(x, y));
  return cdf_of(std::move(values));
}

inline std::vector<CdfRow> similarity_cdf_within(const std::vector<FeatureVector>& group) {
  if (group.size() < 2) throw EmptyInputError();
  std::vector<double> values;
  values.reserve(group.size() * (group.size() - 1) / 2);
  for (std::size_t i = 0; i < group.size(); ++i)
    for (std::size_t j = i + 1; j < group.size(); ++j)
      values.push_back(cosine(group[i], group[j]));
  return cdf_of(std::move(values));
}

}  // namespace jstrack
