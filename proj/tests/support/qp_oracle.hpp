#pragma once

// Dense brute-force QP solver used as the oracle for the working-set solver:
// projected gradient descent on min 1/2 a'Qa over the box-capped simplex
// constraints of the one-class and nu-SVC duals. Slow and simple on purpose.

#include <algorithm>
#include <cmath>
#include <vector>

namespace jstrack::testsupport {

using Matrix = std::vector<std::vector<double>>;

// Projects v onto { a : sum(a) = s, 0 <= a_i <= C } by bisecting the shift.
inline std::vector<double> project_capped_simplex(const std::vector<double>& v,
                                                  double s, double C) {
  double lo = -C, hi = 0;
  for (double x : v) {
    lo = std::min(lo, x - C);
    hi = std::max(hi, x);
  }
  auto mass = [&](double theta) {
    double m = 0;
    for (double x : v) m += std::clamp(x - theta, 0.0, C);
    return m;
  };
  for (int it = 0; it < 200; ++it) {
    double mid = (lo + hi) / 2;
    if (mass(mid) > s) lo = mid;
    else hi = mid;
  }
  std::vector<double> out(v.size());
  double theta = (lo + hi) / 2;
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::clamp(v[i] - theta, 0.0, C);
  return out;
}

// Q_ij = y_i y_j K_ij. Per-class sums stay at their initial values, so the
// projection splits by class.
inline double qp_oracle_objective(const Matrix& K, const std::vector<int>& y,
                                  double C, double sum_pos, double sum_neg,
                                  int iters = 60000) {
  const std::size_t m = K.size();
  Matrix Q(m, std::vector<double>(m));
  double L = 0;
  for (std::size_t i = 0; i < m; ++i) {
    double row = 0;
    for (std::size_t j = 0; j < m; ++j) {
      Q[i][j] = y[i] * y[j] * K[i][j];
      row += std::fabs(Q[i][j]);
    }
    L = std::max(L, row);
  }
  double step = 1.0 / std::max(L, 1e-9);

  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < m; ++i) (y[i] > 0 ? pos : neg).push_back(i);

  std::vector<double> alpha(m, 0.0);
  auto project = [&]() {
    for (auto* grp : {&pos, &neg}) {
      if (grp->empty()) continue;
      double target = grp == &pos ? sum_pos : sum_neg;
      std::vector<double> sub;
      for (auto i : *grp) sub.push_back(alpha[i]);
      auto projected = project_capped_simplex(sub, target, C);
      for (std::size_t k = 0; k < grp->size(); ++k) alpha[(*grp)[k]] = projected[k];
    }
  };
  project();

  std::vector<double> grad(m);
  for (int it = 0; it < iters; ++it) {
    for (std::size_t i = 0; i < m; ++i) {
      double g = 0;
      for (std::size_t j = 0; j < m; ++j) g += Q[i][j] * alpha[j];
      grad[i] = g;
    }
    for (std::size_t i = 0; i < m; ++i) alpha[i] -= step * grad[i];
    project();
  }

  double obj = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) obj += 0.5 * alpha[i] * Q[i][j] * alpha[j];
  return obj;
}

}  // namespace jstrack::testsupport
