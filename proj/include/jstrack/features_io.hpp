#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "jstrack/features.hpp"

namespace jstrack {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

inline std::string escape_term(const std::string& t) {
  std::string out;
  out.reserve(t.size());
  for (char c : t) {
    if (c == '\\') out += "\\\\";
    else if (c == '\t') out += "\\t";
    else if (c == '\n') out += "\\n";
    else out += c;
  }
  return out;
}

inline std::string unescape_term(const std::string& t) {
  std::string out;
  out.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] == '\\' && i + 1 < t.size()) {
      char n = t[++i];
      out += n == 't' ? '\t' : n == 'n' ? '\n' : n;
    } else {
      out += t[i];
    }
  }
  return out;
}

}  // namespace detail

// Versioned vocabulary text format:
//   jstrack-vocab v1
//   model=seq7
//   cap=none | cap=200
//   log=natural
//   aggregate=sum
//   corpus_size=N
//   rank<TAB>idf<TAB>term
inline std::string write_vocabulary_text(const TermVocabulary& vocab,
                                         std::optional<int> cap) {
  std::ostringstream out;
  out << "jstrack-vocab v1\n";
  out << "model=" << vocab.model << "\n";
  out << "cap=" << (cap ? std::to_string(*cap) : "none") << "\n";
  out << "log=natural\n";
  out << "aggregate=sum\n";
  out << "corpus_size=" << vocab.corpus_size << "\n";
  for (std::size_t i = 0; i < vocab.terms.size(); ++i)
    out << i << "\t" << fmt_double(vocab.idf[i]) << "\t"
        << detail::escape_term(vocab.terms[i]) << "\n";
  return out.str();
}

inline TermVocabulary read_vocabulary_text(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "jstrack-vocab v1")
    throw VersionMismatchError(line);
  TermVocabulary vocab;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto eq = line.find('=');
    auto tab = line.find('\t');
    if (tab == std::string::npos && eq != std::string::npos) {
      std::string key = line.substr(0, eq), value = line.substr(eq + 1);
      if (key == "model") vocab.model = value;
      else if (key == "corpus_size") vocab.corpus_size = std::stoull(value);
      // cap/log/aggregate are descriptive
      continue;
    }
    auto tab2 = line.find('\t', tab + 1);
    if (tab == std::string::npos || tab2 == std::string::npos)
      throw DataError("malformed vocabulary line: " + line);
    vocab.idf.push_back(std::stod(line.substr(tab + 1, tab2 - tab - 1)));
    vocab.terms.push_back(detail::unescape_term(line.substr(tab2 + 1)));
  }
  vocab.rebuild_lookup();
  vocab.fingerprint_from_contents();
  return vocab;
}

inline void save_vocabulary(const TermVocabulary& vocab, const std::string& path,
                            std::optional<int> cap = std::nullopt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << write_vocabulary_text(vocab, cap);
}

inline TermVocabulary load_vocabulary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  return read_vocabulary_text(in);
}

// Vector file: one `program_id<TAB>idx:weight,idx:weight,...` per line.
inline std::string write_vector_line(const FeatureVector& v) {
  std::string out = v.program_id + "\t";
  for (std::size_t i = 0; i < v.entries.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v.entries[i].index) + ":" + fmt_double(v.entries[i].weight);
  }
  return out;
}

inline FeatureVector parse_vector_line(const std::string& line,
                                       std::uint64_t vocab_fingerprint) {
  auto tab = line.find('\t');
  if (tab == std::string::npos) throw DataError("malformed vector line: " + line);
  FeatureVector v;
  v.program_id = line.substr(0, tab);
  v.vocab_fingerprint = vocab_fingerprint;
  std::size_t pos = tab + 1;
  while (pos < line.size()) {
    auto comma = line.find(',', pos);
    if (comma == std::string::npos) comma = line.size();
    auto colon = line.find(':', pos);
    if (colon == std::string::npos || colon > comma)
      throw DataError("malformed vector entry: " + line.substr(pos, comma - pos));
    v.entries.push_back(
        {static_cast<std::uint32_t>(std::stoul(line.substr(pos, colon - pos))),
         std::stod(line.substr(colon + 1, comma - colon - 1))});
    pos = comma + 1;
  }
  return v;
}

}  // namespace jstrack
