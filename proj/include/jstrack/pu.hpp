#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "jstrack/svm.hpp"

namespace jstrack {

// Platt sigmoid: P(l=1 | score s) = 1 / (1 + exp(a*s + b)), fitted by
// regularized maximum likelihood with Newton steps and backtracking
// (Lin/Weng/Platt). Targets are prior-smoothed, so probabilities never
// saturate to exactly 0 or 1 on the training scores.
struct PlattSigmoid {
  double a = -1.0;
  double b = 0.0;

  double prob(double score) const {
    double z = a * score + b;
    // numerically stable in both tails
    if (z >= 0) return std::exp(-z) / (1.0 + std::exp(-z));
    return 1.0 / (1.0 + std::exp(z));
  }
};

inline PlattSigmoid fit_platt(const std::vector<double>& scores,
                              const std::vector<int>& labels) {
  if (scores.size() != labels.size() || scores.empty())
    throw DataError("platt fit needs matched, non-empty scores and labels");
  double prior1 = 0, prior0 = 0;
  for (int l : labels) (l > 0 ? prior1 : prior0) += 1;

  const double hi_target = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo_target = 1.0 / (prior0 + 2.0);
  std::vector<double> t(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i)
    t[i] = labels[i] > 0 ? hi_target : lo_target;

  double a = 0.0, b = std::log((prior0 + 1.0) / (prior1 + 1.0));
  auto objective = [&](double pa, double pb) {
    double obj = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      double z = pa * scores[i] + pb;
      // cross-entropy log(1+exp(z)) - (1-t)*z in a tail-stable form
      obj += z >= 0 ? t[i] * z + std::log1p(std::exp(-z))
                    : (t[i] - 1) * z + std::log1p(std::exp(z));
    }
    return obj;
  };

  double fval = objective(a, b);
  const double min_step = 1e-10, sigma = 1e-12;
  for (int it = 0; it < 100; ++it) {
    double h11 = sigma, h22 = sigma, h21 = 0, g1 = 0, g2 = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      double z = a * scores[i] + b;
      double p = z >= 0 ? std::exp(-z) / (1 + std::exp(-z)) : 1 / (1 + std::exp(z));
      double q = 1 - p;
      double d2 = p * q;
      h11 += scores[i] * scores[i] * d2;
      h22 += d2;
      h21 += scores[i] * d2;
      double d1 = t[i] - p;
      g1 += scores[i] * d1;
      g2 += d1;
    }
    if (std::fabs(g1) < 1e-5 && std::fabs(g2) < 1e-5) break;
    double det = h11 * h22 - h21 * h21;
    double da = -(h22 * g1 - h21 * g2) / det;
    double db = -(-h21 * g1 + h11 * g2) / det;
    double gd = g1 * da + g2 * db;
    double step = 1.0;
    while (step >= min_step) {
      double na = a + step * da, nb = b + step * db;
      double nf = objective(na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        a = na;
        b = nb;
        fval = nf;
        break;
      }
      step /= 2;
    }
    if (step < min_step) break;
  }
  return {a, b};
}

// PU model: probabilistic labeled-vs-unlabeled scorer g (SVM + sigmoid) plus
// the constant c = Pr[l=1 | y=+1] estimated on a held-out slice of the
// labeled positives. Pr[y=+1 | x] = min(1, g(x)/c).
struct PuModel {
  SsvmModel g;
  PlattSigmoid sigmoid;
  double c = 1.0;
  double threshold = 0.5;
  bool collapsed = false;
};

inline double pu_g(const PuModel& m, const FeatureVector& x) {
  return m.sigmoid.prob(decision_value(m.g, x));
}

inline double pu_probability(const PuModel& m, const FeatureVector& x) {
  return std::min(1.0, pu_g(m, x) / m.c);
}

inline Decision classify_pu(const PuModel& m, const FeatureVector& x) {
  double p = pu_probability(m, x);
  return {p >= m.threshold ? Label::Tracking : Label::Functional, p};
}

// Out-of-fold calibration scores: the sigmoid is fitted on scores from SVMs
// that never saw the scored point. Falls back to in-sample scores when a
// class is too small to fold.
namespace detail {

inline std::vector<double> oof_scores(const std::vector<FeatureVector>& pos,
                                      const std::vector<FeatureVector>& neg,
                                      double svm_c, KernelSpec spec, int folds,
                                      SplitMix64& rng, std::vector<int>& labels_out) {
  std::vector<double> scores(pos.size() + neg.size());
  labels_out.assign(pos.size() + neg.size(), 0);
  for (std::size_t i = 0; i < pos.size(); ++i) labels_out[i] = 1;

  double weight = static_cast<double>(neg.size()) / static_cast<double>(pos.size());
  int k = std::min<int>(folds, static_cast<int>(std::min(pos.size(), neg.size())));
  if (k < 2) {
    auto model = train_csvm(pos, neg, svm_c, spec, weight);
    for (std::size_t i = 0; i < pos.size(); ++i)
      scores[i] = decision_value(model, pos[i]);
    for (std::size_t j = 0; j < neg.size(); ++j)
      scores[pos.size() + j] = decision_value(model, neg[j]);
    return scores;
  }

  auto assign = [&](std::size_t n) {
    std::vector<int> fold(n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    for (std::size_t i = 0; i < n; ++i) fold[order[i]] = static_cast<int>(i % k);
    return fold;
  };
  auto fold_pos = assign(pos.size());
  auto fold_neg = assign(neg.size());

  for (int f = 0; f < k; ++f) {
    std::vector<FeatureVector> tp, tn;
    for (std::size_t i = 0; i < pos.size(); ++i)
      if (fold_pos[i] != f) tp.push_back(pos[i]);
    for (std::size_t j = 0; j < neg.size(); ++j)
      if (fold_neg[j] != f) tn.push_back(neg[j]);
    auto model = train_csvm(tp, tn, svm_c, spec, weight);
    for (std::size_t i = 0; i < pos.size(); ++i)
      if (fold_pos[i] == f) scores[i] = decision_value(model, pos[i]);
    for (std::size_t j = 0; j < neg.size(); ++j)
      if (fold_neg[j] == f) scores[pos.size() + j] = decision_value(model, neg[j]);
  }
  return scores;
}

}  // namespace detail

// Trains the PU classifier. A `validation_fraction` slice of the labeled
// positives is held out as P; g (a C-SVM with sigmoid calibration) is trained
// to separate the remaining labeled examples from the unlabeled pool; c is
// the mean of g over P.
inline PuModel train_pu(const std::vector<FeatureVector>& labeled_positives,
                        const std::vector<FeatureVector>& unlabeled, double svm_c,
                        KernelSpec kernel_spec, double validation_fraction = 0.2,
                        std::uint64_t seed = 1, int calibration_folds = 3,
                        double threshold = 0.5) {
  if (labeled_positives.empty() || unlabeled.empty())
    throw DataError("PU training needs labeled positives and an unlabeled pool");
  if (validation_fraction <= 0 || validation_fraction > 0.5)
    throw DataError("validation_fraction must be in (0, 0.5]");

  std::vector<std::size_t> order(labeled_positives.size());
  std::iota(order.begin(), order.end(), 0);
  SplitMix64 rng(seed);
  rng.shuffle(order);
  std::size_t n_val = static_cast<std::size_t>(
      std::ceil(validation_fraction * static_cast<double>(labeled_positives.size())));
  if (n_val == 0 || n_val >= labeled_positives.size()) throw EmptyValidationError();

  std::vector<FeatureVector> validation, train_pos;
  for (std::size_t i = 0; i < order.size(); ++i)
    (i < n_val ? validation : train_pos).push_back(labeled_positives[order[i]]);

  // Hold out the same fraction of the unlabeled pool. Otherwise the labeling
  // rate inside g's training universe shifts from c to c(1-v)/(1-cv) and the
  // estimate inherits that shift.
  std::vector<std::size_t> uorder(unlabeled.size());
  std::iota(uorder.begin(), uorder.end(), 0);
  rng.shuffle(uorder);
  std::size_t n_val_u = static_cast<std::size_t>(
      std::ceil(validation_fraction * static_cast<double>(unlabeled.size())));
  if (n_val_u >= unlabeled.size()) throw EmptyValidationError();
  std::vector<FeatureVector> train_unl;
  for (std::size_t i = n_val_u; i < uorder.size(); ++i)
    train_unl.push_back(unlabeled[uorder[i]]);

  PuModel model;
  model.threshold = threshold;
  std::vector<int> labels;
  auto scores = detail::oof_scores(train_pos, train_unl, svm_c, kernel_spec,
                                   calibration_folds, rng, labels);
  double mean = std::accumulate(scores.begin(), scores.end(), 0.0) /
                static_cast<double>(scores.size());
  double var = 0;
  for (double s : scores) var += (s - mean) * (s - mean);
  model.collapsed = var / static_cast<double>(scores.size()) < 1e-12;

  model.sigmoid = fit_platt(scores, labels);
  double weight =
      static_cast<double>(unlabeled.size()) / static_cast<double>(train_pos.size());
  model.g = train_csvm(train_pos, unlabeled, svm_c, kernel_spec, weight);

  double sum = 0;
  for (const auto& v : validation) sum += pu_g(model, v);
  model.c = sum / static_cast<double>(validation.size());
  return model;
}

}  // namespace jstrack
