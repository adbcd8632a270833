#pragma once

#include <cmath>
#include <utility>

#include "taylorlab/common.hpp"

namespace taylorlab {

/// Nodes and weights of a 1-D quadrature rule on some interval (or on all of R
/// for the Hermite rule, where weights already absorb the Gaussian factor).
struct QuadratureRule {
  Vec nodes;
  Vec weights;
};

namespace detail {

// Nodes/weights of the n-point Gauss-Legendre rule on [-1, 1], by Newton
// iteration on the Legendre recurrence.
inline QuadratureRule gauss_legendre_unit(int n) {
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev-like initial guess for the i-th root.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace detail

/// Composite Gauss-Legendre rule over [a, b]: `panels` panels of
/// `points_per_panel` nodes each.
inline QuadratureRule composite_gauss_legendre(double a, double b, int panels,
                                               int points_per_panel = 12) {
  require(panels >= 1 && points_per_panel >= 2, "quadrature: bad panel layout");
  const QuadratureRule base = detail::gauss_legendre_unit(points_per_panel);
  const int total = panels * points_per_panel;
  QuadratureRule rule;
  rule.nodes.resize(total);
  rule.weights.resize(total);
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    for (int j = 0; j < points_per_panel; ++j) {
      rule.nodes[p * points_per_panel + j] = lo + 0.5 * h * (base.nodes[j] + 1.0);
      rule.weights[p * points_per_panel + j] = 0.5 * h * base.weights[j];
    }
  }
  return rule;
}

/// Gauss-Hermite rule in "flat" form: returns nodes x_i (roots of the degree-n
/// Hermite polynomial) and weights W_i = w_i * exp(x_i^2), so that
///   integral f(x) dx  ~=  sum_i W_i f(x_i)
/// is exact whenever f(x) = p(x) exp(-x^2) with deg p <= 2n-1. The modified
/// weights are computed directly from normalized Hermite functions, which
/// keeps every intermediate O(1) and avoids overflow at large |x|.
inline QuadratureRule gauss_hermite_flat(int n) {
  require(n >= 2, "quadrature: Hermite rule needs n >= 2");
  // Golub-Welsch: nodes are eigenvalues of the symmetric tridiagonal Jacobi
  // matrix with off-diagonal sqrt(k/2).
  Mat jacobi = Mat::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double off = std::sqrt(k / 2.0);
    jacobi(k - 1, k) = off;
    jacobi(k, k - 1) = off;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(jacobi);
  QuadratureRule rule;
  rule.nodes = es.eigenvalues();
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = rule.nodes[i];
    // Normalized Hermite functions  hf_k = H_k(x) e^{-x^2/2} / sqrt(2^k k! sqrt(pi)).
    double hf0 = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
    double hf1 = std::sqrt(2.0) * x * hf0;
    for (int k = 1; k < n - 1; ++k) {
      double hf2 = std::sqrt(2.0 / (k + 1.0)) * x * hf1 - std::sqrt(k / (k + 1.0)) * hf0;
      hf0 = hf1;
      hf1 = hf2;
    }
    // After the recurrence hf1 holds hf_{n-1}(x_i); the flat weight is
    // 1 / (n * hf_{n-1}(x_i)^2).
    rule.weights[i] = 1.0 / (n * hf1 * hf1);
  }
  return rule;
}

}  // namespace taylorlab
