#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "jstrack/kernel.hpp"

namespace jstrack {

namespace smo {

constexpr double kBoundEps = 1e-12;
constexpr double kTau = 1e-12;

struct Result {
  std::vector<double> alpha;
  double objective = 0;
  double r_pos = 0;  // KKT level for the +1 class
  double r_neg = 0;  // and for the -1 class
  long iterations = 0;
};

// Pairwise working-set solver for min 1/2 a'Qa, Q_ij = y_i y_j K_ij, subject
// to 0 <= a_i <= C with the per-class sums fixed by the initial point. Both
// duals here (one-class, nu-SVC) have this shape; pair updates inside one
// class preserve the constraints. Second-order working-set selection.
inline Result solve(KernelCache& cache, const std::vector<int>& y,
                    std::vector<double> alpha, double C, double tol,
                    long max_iter) {
  const std::size_t m = alpha.size();
  std::vector<double> G(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    if (alpha[j] <= kBoundEps) continue;
    const auto& row = cache.row(j);
    for (std::size_t i = 0; i < m; ++i)
      G[i] += y[i] * y[j] * alpha[j] * row[i];
  }

  struct Pair {
    int i = -1, j = -1;
    double gap = 0;
  };
  auto select_in_class = [&](int cls) {
    Pair best;
    double gmin = std::numeric_limits<double>::infinity();
    int imin = -1;
    for (std::size_t t = 0; t < m; ++t) {
      if (y[t] != cls) continue;
      if (alpha[t] < C - kBoundEps && G[t] < gmin) {
        gmin = G[t];
        imin = static_cast<int>(t);
      }
    }
    if (imin < 0) return best;
    const auto& row_i = cache.row(static_cast<std::size_t>(imin));
    double kii = row_i[static_cast<std::size_t>(imin)];
    double best_gain = -1, gmax = -std::numeric_limits<double>::infinity();
    int jbest = -1;
    for (std::size_t t = 0; t < m; ++t) {
      if (y[t] != cls || alpha[t] <= kBoundEps) continue;
      gmax = std::max(gmax, G[t]);
      double diff = G[t] - gmin;
      if (diff <= 0) continue;
      double quad = kii + cache.diag(t) - 2.0 * row_i[t];
      if (quad < kTau) quad = kTau;
      double gain = diff * diff / quad;
      if (gain > best_gain) {
        best_gain = gain;
        jbest = static_cast<int>(t);
      }
    }
    if (jbest < 0) return best;
    best.i = imin;
    best.j = jbest;
    best.gap = gmax - gmin;
    return best;
  };

  long iter = 0;
  double last_checkpoint_gap = std::numeric_limits<double>::infinity();
  for (; iter < max_iter; ++iter) {
    Pair p = select_in_class(+1);
    Pair n = select_in_class(-1);
    Pair& w = p.gap >= n.gap ? p : n;
    double gap = std::max(p.gap, n.gap);
    if (w.i < 0 || gap < tol) break;
    if (iter % 1000 == 999) {
      if (gap > last_checkpoint_gap - 1e-15)
        throw ConvergenceError("working-set solver stalled at gap " +
                               std::to_string(gap));
      last_checkpoint_gap = gap;
    }

    std::size_t i = static_cast<std::size_t>(w.i), j = static_cast<std::size_t>(w.j);
    const auto row_i = cache.row(i);  // copy: row j may evict it
    const auto& row_j = cache.row(j);
    double quad = row_i[i] + row_j[j] - 2.0 * row_i[j];
    if (quad < kTau) quad = kTau;
    double delta = (G[j] - G[i]) / quad;
    delta = std::min(delta, C - alpha[i]);
    delta = std::min(delta, alpha[j]);
    alpha[i] += delta;
    alpha[j] -= delta;
    int cls = y[i];
    for (std::size_t t = 0; t < m; ++t)
      G[t] += delta * y[t] * cls * (row_i[t] - row_j[t]);
  }

  Result out;
  out.iterations = iter;
  out.objective = 0;
  for (std::size_t t = 0; t < m; ++t) out.objective += 0.5 * alpha[t] * G[t];

  auto level = [&](int cls) {
    double sum = 0, lo = -std::numeric_limits<double>::infinity(),
           hi = std::numeric_limits<double>::infinity();
    int interior = 0;
    for (std::size_t t = 0; t < m; ++t) {
      if (y[t] != cls) continue;
      if (alpha[t] > kBoundEps && alpha[t] < C - kBoundEps) {
        sum += G[t];
        ++interior;
      } else if (alpha[t] >= C - kBoundEps) {
        lo = std::max(lo, G[t]);
      } else {
        hi = std::min(hi, G[t]);
      }
    }
    if (interior > 0) return sum / interior;
    if (std::isinf(lo)) return std::isinf(hi) ? 0.0 : hi;
    if (std::isinf(hi)) return lo;
    return (lo + hi) / 2;
  };
  out.r_pos = level(+1);
  out.r_neg = level(-1);
  out.alpha = std::move(alpha);
  return out;
}

// Standard C-SVM dual: min 1/2 a'Qa - e'a with Q_ij = y_i y_j K_ij,
// 0 <= a_i <= C_{y_i}, y'a = 0, started from a = 0. Per-class C supports
// class weighting. Maximal violating pair with the second-order tie-break;
// pairs may cross classes.
inline Result solve_c_svm(KernelCache& cache, const std::vector<int>& y, double c_pos,
                          double c_neg, double tol, long max_iter) {
  const std::size_t m = y.size();
  auto box = [&](std::size_t t) { return y[t] > 0 ? c_pos : c_neg; };
  std::vector<double> alpha(m, 0.0), G(m, -1.0);  // G = Qa + p, p = -e

  auto q_row = [&](std::size_t i) {
    std::vector<double> q = cache.row(i);
    for (std::size_t t = 0; t < m; ++t) q[t] *= y[i] * y[t];
    return q;
  };

  long iter = 0;
  double last_checkpoint_gap = std::numeric_limits<double>::infinity();
  for (; iter < max_iter; ++iter) {
    // i maximizes -y_t G_t over I_up
    double gmax = -std::numeric_limits<double>::infinity();
    int i = -1;
    for (std::size_t t = 0; t < m; ++t) {
      bool in_up = y[t] > 0 ? alpha[t] < box(t) - kBoundEps : alpha[t] > kBoundEps;
      if (in_up && -y[t] * G[t] >= gmax) {
        gmax = -y[t] * G[t];
        i = static_cast<int>(t);
      }
    }
    if (i < 0) break;
    std::size_t si = static_cast<std::size_t>(i);
    const auto Ki = cache.row(si);  // plain kernel row, copied before other lookups
    const auto Qi = q_row(si);
    double gmin = std::numeric_limits<double>::infinity();
    int j = -1;
    double best_gain = -1;
    for (std::size_t t = 0; t < m; ++t) {
      bool in_low = y[t] > 0 ? alpha[t] > kBoundEps : alpha[t] < box(t) - kBoundEps;
      if (!in_low) continue;
      double ygt = -y[t] * G[t];
      gmin = std::min(gmin, ygt);
      double diff = gmax - ygt;
      if (diff <= 0) continue;
      double quad = Ki[si] + cache.diag(t) - 2.0 * y[si] * y[t] * Ki[t];
      if (quad < kTau) quad = kTau;
      double gain = diff * diff / quad;
      if (gain > best_gain) {
        best_gain = gain;
        j = static_cast<int>(t);
      }
    }
    if (j < 0 || gmax - gmin < tol) break;
    if (iter % 1000 == 999) {
      if (gmax - gmin > last_checkpoint_gap - 1e-15)
        throw ConvergenceError("c-svm solver stalled at gap " +
                               std::to_string(gmax - gmin));
      last_checkpoint_gap = gmax - gmin;
    }

    std::size_t sj = static_cast<std::size_t>(j);
    const auto Qj = q_row(sj);
    const double Ci = box(si), Cj = box(sj);
    double old_i = alpha[si], old_j = alpha[sj];
    if (y[si] != y[sj]) {
      double quad = Ki[si] + cache.diag(sj) - 2.0 * Ki[sj];
      if (quad < kTau) quad = kTau;
      double delta = (-G[si] - G[sj]) / quad;
      alpha[si] += delta;
      alpha[sj] += delta;
      double diff = old_i - old_j;
      if (diff > 0) {
        if (alpha[sj] < 0) { alpha[sj] = 0; alpha[si] = diff; }
      } else {
        if (alpha[si] < 0) { alpha[si] = 0; alpha[sj] = -diff; }
      }
      if (diff > Ci - Cj) {
        if (alpha[si] > Ci) { alpha[si] = Ci; alpha[sj] = Ci - diff; }
      } else {
        if (alpha[sj] > Cj) { alpha[sj] = Cj; alpha[si] = Cj + diff; }
      }
    } else {
      double quad = Ki[si] + cache.diag(sj) - 2.0 * Ki[sj];
      if (quad < kTau) quad = kTau;
      double delta = (G[si] - G[sj]) / quad;
      alpha[si] -= delta;
      alpha[sj] += delta;
      double sum = old_i + old_j;
      if (sum > Ci) {
        if (alpha[si] > Ci) { alpha[si] = Ci; alpha[sj] = sum - Ci; }
      } else {
        if (alpha[sj] < 0) { alpha[sj] = 0; alpha[si] = sum; }
      }
      if (sum > Cj) {
        if (alpha[sj] > Cj) { alpha[sj] = Cj; alpha[si] = sum - Cj; }
      } else {
        if (alpha[si] < 0) { alpha[si] = 0; alpha[sj] = sum; }
      }
    }
    double di = alpha[si] - old_i, dj = alpha[sj] - old_j;
    for (std::size_t t = 0; t < m; ++t) G[t] += Qi[t] * di + Qj[t] * dj;
  }

  Result out;
  out.iterations = iter;
  out.objective = 0;
  for (std::size_t t = 0; t < m; ++t)
    out.objective += 0.5 * alpha[t] * (G[t] - 1.0);  // G - e = Qa, minus e'a

  // f(x) = sum y_j a_j K(x_j, x) - rho
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0;
  int n_free = 0;
  for (std::size_t t = 0; t < m; ++t) {
    double yg = y[t] * G[t];
    if (alpha[t] > kBoundEps && alpha[t] < box(t) - kBoundEps) {
      sum_free += yg;
      ++n_free;
    } else if ((alpha[t] <= kBoundEps && y[t] > 0) ||
               (alpha[t] >= box(t) - kBoundEps && y[t] < 0)) {
      ub = std::min(ub, yg);
    } else {
      lb = std::max(lb, yg);
    }
  }
  if (n_free > 0) out.r_pos = sum_free / n_free;
  else if (std::isinf(ub)) out.r_pos = std::isinf(lb) ? 0.0 : lb;
  else if (std::isinf(lb)) out.r_pos = ub;
  else out.r_pos = (ub + lb) / 2;
  out.r_neg = out.r_pos;
  out.alpha = std::move(alpha);
  return out;
}

}  // namespace smo

struct Decision {
  Label label;
  double value = 0;
};

// ----- one-class SVM -----

struct OcsvmModel {
  std::vector<FeatureVector> support;
  std::vector<double> alpha;  // sums to 1
  double rho = 0;
  KernelSpec kernel;
  double nu = 0;
  bool degenerate = false;
  std::uint64_t vocab_fingerprint = 0;
};

inline double decision_value(const OcsvmModel& m, const FeatureVector& x) {
  if (!m.support.empty() && m.support[0].vocab_fingerprint != x.vocab_fingerprint)
    throw VocabMismatchError();
  double s = 0;
  for (std::size_t i = 0; i < m.support.size(); ++i)
    s += m.alpha[i] * kernel(m.kernel, m.support[i], x);
  return s - m.rho;
}

// Standard inlier semantics: the model is trained on tracking programs only,
// so decision >= 0 marks the trained class. `paper_sign` flips the mapping
// to the sentence as printed in the source material.
inline Decision classify_ocsvm(const OcsvmModel& m, const FeatureVector& x,
                               bool paper_sign = false) {
  double v = decision_value(m, x);
  bool inlier = v >= 0;
  if (paper_sign) inlier = !inlier;
  return {inlier ? Label::Tracking : Label::Functional, v};
}

inline OcsvmModel train_ocsvm(const std::vector<FeatureVector>& positives, double nu,
                              KernelSpec kernel_spec, double tol = 1e-3,
                              long max_iter = 1000000) {
  if (positives.size() < 2) throw DataError("one-class training needs at least 2 vectors");
  if (nu <= 0 || nu > 1) throw DataError("nu must be in (0, 1]");
  for (const auto& v : positives)
    if (v.vocab_fingerprint != positives[0].vocab_fingerprint) throw VocabMismatchError();

  OcsvmModel model;
  model.kernel = kernel_spec;
  model.nu = nu;
  model.vocab_fingerprint = positives[0].vocab_fingerprint;

  bool all_same = true;
  for (const auto& v : positives)
    if (squared_distance(v, positives[0]) != 0.0) {
      all_same = false;
      break;
    }
  if (all_same) {
    model.degenerate = true;
    model.support = {positives[0]};
    model.alpha = {1.0};
    model.rho = kernel(kernel_spec, positives[0], positives[0]);
    return model;
  }

  const std::size_t m = positives.size();
  const double C = 1.0 / (nu * static_cast<double>(m));
  std::vector<double> alpha(m, 0.0);
  double remaining = 1.0;
  for (std::size_t i = 0; i < m && remaining > 0; ++i) {
    alpha[i] = std::min(C, remaining);
    remaining -= alpha[i];
  }
  std::vector<int> y(m, 1);
  KernelCache cache(positives, kernel_spec);
  auto result = smo::solve(cache, y, std::move(alpha), C, tol, max_iter);

  model.rho = result.r_pos;
  for (std::size_t i = 0; i < m; ++i) {
    if (result.alpha[i] > smo::kBoundEps) {
      model.support.push_back(positives[i]);
      model.alpha.push_back(result.alpha[i]);
    }
  }
  return model;
}

// ----- two-class nu-SVM (the supervised benchmark) -----

struct SsvmModel {
  std::vector<FeatureVector> support;
  std::vector<double> coef;  // y_i * alpha_i
  double bias = 0;
  KernelSpec kernel;
  double nu = 0;  // nu-parameterized training; 0 when C-parameterized
  double c = 0;   // C-parameterized training; 0 when nu-parameterized
  std::uint64_t vocab_fingerprint = 0;
};

inline double decision_value(const SsvmModel& m, const FeatureVector& x) {
  if (!m.support.empty() && m.support[0].vocab_fingerprint != x.vocab_fingerprint)
    throw VocabMismatchError();
  double s = m.bias;
  for (std::size_t i = 0; i < m.support.size(); ++i)
    s += m.coef[i] * kernel(m.kernel, m.support[i], x);
  return s;
}

inline Decision classify_ssvm(const SsvmModel& m, const FeatureVector& x) {
  double v = decision_value(m, x);
  return {v >= 0 ? Label::Tracking : Label::Functional, v};
}

inline double max_feasible_nu(std::size_t n_pos, std::size_t n_neg) {
  std::size_t total = n_pos + n_neg;
  return 2.0 * static_cast<double>(std::min(n_pos, n_neg)) / static_cast<double>(total);
}

inline SsvmModel train_ssvm(const std::vector<FeatureVector>& positives,
                            const std::vector<FeatureVector>& negatives, double nu,
                            KernelSpec kernel_spec, double tol = 1e-3,
                            long max_iter = 1000000) {
  if (positives.empty() || negatives.empty())
    throw DataError("two-class training needs both classes");
  if (nu <= 0 || nu > 1) throw DataError("nu must be in (0, 1]");
  if (nu > max_feasible_nu(positives.size(), negatives.size()) + 1e-12)
    throw InfeasibleNuError(nu);

  std::vector<FeatureVector> data;
  std::vector<int> y;
  for (const auto& v : positives) {
    data.push_back(v);
    y.push_back(+1);
  }
  for (const auto& v : negatives) {
    data.push_back(v);
    y.push_back(-1);
  }
  for (const auto& v : data)
    if (v.vocab_fingerprint != data[0].vocab_fingerprint) throw VocabMismatchError();

  const std::size_t m = data.size();
  const double C = 1.0 / static_cast<double>(m);
  std::vector<double> alpha(m, 0.0);
  for (int cls : {+1, -1}) {
    double remaining = nu / 2;
    for (std::size_t i = 0; i < m && remaining > smo::kBoundEps; ++i) {
      if (y[i] != cls) continue;
      alpha[i] = std::min(C, remaining);
      remaining -= alpha[i];
    }
  }
  KernelCache cache(data, kernel_spec);
  auto result = smo::solve(cache, y, std::move(alpha), C, tol, max_iter);

  SsvmModel model;
  model.kernel = kernel_spec;
  model.nu = nu;
  model.vocab_fingerprint = data[0].vocab_fingerprint;
  model.bias = (result.r_neg - result.r_pos) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    if (result.alpha[i] > smo::kBoundEps) {
      model.support.push_back(data[i]);
      model.coef.push_back(y[i] * result.alpha[i]);
    }
  }
  return model;
}

// C-parameterized soft-margin SVM, same decision shape as the nu variant.
// Always feasible, which is what the PU base classifier needs: its two
// "classes" (labeled vs unlabeled) overlap by construction. `pos_weight`
// scales the positive-class C, libsvm's -w style.
inline SsvmModel train_csvm(const std::vector<FeatureVector>& positives,
                            const std::vector<FeatureVector>& negatives, double c,
                            KernelSpec kernel_spec, double pos_weight = 1.0,
                            double tol = 1e-3, long max_iter = 1000000) {
  if (positives.empty() || negatives.empty())
    throw DataError("two-class training needs both classes");
  if (c <= 0 || pos_weight <= 0) throw DataError("C and class weight must be positive");

  std::vector<FeatureVector> data;
  std::vector<int> y;
  for (const auto& v : positives) {
    data.push_back(v);
    y.push_back(+1);
  }
  for (const auto& v : negatives) {
    data.push_back(v);
    y.push_back(-1);
  }
  for (const auto& v : data)
    if (v.vocab_fingerprint != data[0].vocab_fingerprint) throw VocabMismatchError();

  KernelCache cache(data, kernel_spec);
  auto result = smo::solve_c_svm(cache, y, c * pos_weight, c, tol, max_iter);

  SsvmModel model;
  model.kernel = kernel_spec;
  model.c = c;
  model.vocab_fingerprint = data[0].vocab_fingerprint;
  model.bias = -result.r_pos;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (result.alpha[i] > smo::kBoundEps) {
      model.support.push_back(data[i]);
      model.coef.push_back(y[i] * result.alpha[i]);
    }
  }
  return model;
}

}  // namespace jstrack
