#pragma once

#include <cmath>
#include <list>
#include <unordered_map>
#include <vector>

#include "jstrack/features.hpp"

namespace jstrack {

struct KernelSpec {
  enum class Kind { Rbf, Linear };
  Kind kind = Kind::Rbf;
  double gamma = 1.0;  // rbf only

  static KernelSpec rbf(double gamma) {
    if (gamma <= 0) throw DataError("rbf gamma must be positive");
    return {Kind::Rbf, gamma};
  }
  static KernelSpec linear() { return {Kind::Linear, 0.0}; }
};

inline double rbf(const FeatureVector& a, const FeatureVector& b, double gamma) {
  check_same_vocab(a, b);
  return std::exp(-gamma * squared_distance(a, b));
}

inline double kernel(const KernelSpec& spec, const FeatureVector& a,
                     const FeatureVector& b) {
  if (spec.kind == KernelSpec::Kind::Linear) {
    check_same_vocab(a, b);
    return dot(a, b);
  }
  return rbf(a, b, spec.gamma);
}

// Row cache over the training kernel matrix. Small problems keep the full
// matrix; past the byte budget it falls back to LRU rows. Purely a
// performance device, values are identical either way.
class KernelCache {
 public:
  KernelCache(const std::vector<FeatureVector>& data, KernelSpec spec,
              std::size_t budget_bytes = 256u << 20)
      : data_(data), spec_(spec) {
    std::size_t full_bytes = data.size() * data.size() * sizeof(double);
    full_ = full_bytes <= budget_bytes;
    max_rows_ = data.empty() ? 0 : std::max<std::size_t>(2, budget_bytes / (data.size() * sizeof(double)));
    if (full_) rows_.resize(data.size());
  }

  std::size_t size() const { return data_.size(); }

  const std::vector<double>& row(std::size_t i) {
    if (full_) {
      if (rows_[i].empty()) rows_[i] = compute_row(i);
      return rows_[i];
    }
    auto it = cache_.find(i);
    if (it != cache_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second.second);
      return it->second.first;
    }
    if (cache_.size() >= max_rows_) {
      cache_.erase(lru_.back());
      lru_.pop_back();
    }
    lru_.push_front(i);
    auto [pos, _] = cache_.emplace(i, std::pair{compute_row(i), lru_.begin()});
    return pos->second.first;
  }

  double diag(std::size_t i) const { return kernel(spec_, data_[i], data_[i]); }

 private:
  std::vector<double> compute_row(std::size_t i) const {
    std::vector<double> r(data_.size());
    for (std::size_t j = 0; j < data_.size(); ++j)
      r[j] = kernel(spec_, data_[i], data_[j]);
    return r;
  }

  const std::vector<FeatureVector>& data_;
  KernelSpec spec_;
  bool full_ = true;
  std::size_t max_rows_ = 0;
  std::vector<std::vector<double>> rows_;
  std::unordered_map<std::size_t, std::pair<std::vector<double>, std::list<std::size_t>::iterator>> cache_;
  std::list<std::size_t> lru_;
};

}  // namespace jstrack
