#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace jstrack {

enum class Label { Tracking, Functional };

inline std::string to_string(Label l) {
  return l == Label::Tracking ? "tracking" : "functional";
}

// Error hierarchy. DataError maps to CLI exit code 2, NumericError to 3.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& msg) : Error(msg) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& msg) : Error(msg) {}
};

class LexError : public DataError {
 public:
  LexError(int line, const std::string& msg)
      : DataError("lex error at line " + std::to_string(line) + ": " + msg),
        line(line) {}
  int line;
};

class ParseError : public DataError {
 public:
  ParseError(int line, const std::string& msg)
      : DataError("parse error at line " + std::to_string(line) + ": " + msg),
        line(line) {}
  int line;
};

class ManifestError : public DataError {
 public:
  ManifestError(int line, const std::string& msg)
      : DataError("manifest error at line " + std::to_string(line) + ": " + msg),
        line(line) {}
  int line;
};

class DuplicateIdError : public DataError {
 public:
  explicit DuplicateIdError(const std::string& id)
      : DataError("duplicate record id: " + id) {}
};

class IoError : public DataError {
 public:
  explicit IoError(const std::string& msg) : DataError(msg) {}
};

class EmptyCorpusError : public DataError {
 public:
  EmptyCorpusError() : DataError("cannot fit a vocabulary on an empty corpus") {}
};

class VocabMismatchError : public DataError {
 public:
  VocabMismatchError() : DataError("feature vectors come from different vocabularies") {}
};

class EmptyValidationError : public DataError {
 public:
  EmptyValidationError() : DataError("validation split of labeled positives is empty") {}
};

class VersionMismatchError : public DataError {
 public:
  explicit VersionMismatchError(const std::string& got)
      : DataError("unsupported model file version: " + got) {}
};

class CorruptModelError : public DataError {
 public:
  explicit CorruptModelError(const std::string& msg)
      : DataError("corrupt model file: " + msg) {}
};

class EmptyPageError : public DataError {
 public:
  EmptyPageError() : DataError("page has no scripts in the off setting") {}
};

class ContainmentViolationError : public DataError {
 public:
  explicit ContainmentViolationError(const std::string& key)
      : DataError("non-surrogate script present only with the tool on: " + key) {}
};

class MissingLabelError : public DataError {
 public:
  explicit MissingLabelError(const std::string& id)
      : DataError("prediction for unlabeled record: " + id) {}
};

class EmptyClassError : public DataError {
 public:
  explicit EmptyClassError(const std::string& cls)
      : DataError("no records with true class " + cls) {}
};

class UniverseMismatchError : public DataError {
 public:
  UniverseMismatchError() : DataError("classifier and tool outputs cover different record sets") {}
};

class EmptyInputError : public DataError {
 public:
  EmptyInputError() : DataError("empty value list") {}
};

class InsufficientPositivesError : public DataError {
 public:
  explicit InsufficientPositivesError(std::size_t n)
      : DataError("need at least 10 tracking records, got " + std::to_string(n)) {}
};

class InfeasibleNuError : public NumericError {
 public:
  explicit InfeasibleNuError(double nu)
      : NumericError("nu = " + std::to_string(nu) + " infeasible for this class balance") {}
};

class ConvergenceError : public NumericError {
 public:
  explicit ConvergenceError(const std::string& msg) : NumericError(msg) {}
};

// Seeded splitmix64. Splits and shuffles go through this generator so that
// runs are reproducible across platforms and standard libraries.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound), bias-free via rejection.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) return 0;
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return v % bound;
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

// Runs fn(i) for i in [0, n) on up to `threads` workers. Work items write to
// disjoint slots, so results are identical regardless of scheduling.
inline void parallel_for(std::size_t n, unsigned threads,
                         const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  threads = std::min<std::size_t>(threads, n);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      try {
        for (std::size_t i = t; i < n; i += threads) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// FNV-1a, used for script identity and vocabulary fingerprints.
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace jstrack
