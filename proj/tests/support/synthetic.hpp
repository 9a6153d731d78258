#pragma once

// Deterministic synthetic data for the learning tests: Gaussian clusters via
// Box-Muller over splitmix64, so results do not depend on the standard
// library's distribution implementations.

#include <cmath>
#include <vector>

#include "jstrack/common.hpp"
#include "jstrack/features.hpp"

namespace jstrack::testsupport {

inline double gaussian(SplitMix64& rng) {
  double u1 = rng.uniform();
  while (u1 <= 1e-300) u1 = rng.uniform();
  double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

inline FeatureVector gaussian_point(const std::vector<double>& center, double sigma,
                                    SplitMix64& rng, const std::string& id = "") {
  std::vector<double> coords(center.size());
  for (std::size_t d = 0; d < center.size(); ++d)
    coords[d] = center[d] + sigma * gaussian(rng);
  return from_dense(coords, id);
}

inline std::vector<FeatureVector> gaussian_cluster(const std::vector<double>& center,
                                                   double sigma, std::size_t count,
                                                   SplitMix64& rng) {
  std::vector<FeatureVector> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(gaussian_point(center, sigma, rng, "p" + std::to_string(i)));
  return out;
}

// Generative PU setting: two well-separated clusters; every positive is
// labeled independently with probability c_star, everything else lands in
// the unlabeled pool.
struct PuCorpus {
  std::vector<FeatureVector> labeled;
  std::vector<FeatureVector> unlabeled;
  std::vector<int> unlabeled_truth;  // +1 positive, -1 negative
};

inline PuCorpus make_pu_corpus(double c_star, std::size_t n_pos, std::size_t n_neg,
                               std::uint64_t seed) {
  SplitMix64 rng(seed);
  PuCorpus out;
  for (std::size_t i = 0; i < n_pos; ++i) {
    auto v = gaussian_point({3, 3, 3, 3}, 1.0, rng, "pos" + std::to_string(i));
    if (rng.uniform() < c_star) {
      out.labeled.push_back(std::move(v));
    } else {
      out.unlabeled.push_back(std::move(v));
      out.unlabeled_truth.push_back(+1);
    }
  }
  for (std::size_t i = 0; i < n_neg; ++i) {
    out.unlabeled.push_back(
        gaussian_point({-3, -3, -3, -3}, 1.0, rng, "neg" + std::to_string(i)));
    out.unlabeled_truth.push_back(-1);
  }
  return out;
}

}  // namespace jstrack::testsupport
