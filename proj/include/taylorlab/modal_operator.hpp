#pragma once

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <utility>

#include "taylorlab/common.hpp"
#include "taylorlab/cross_section.hpp"

namespace taylorlab {

/// Truncated mode-space symbol of the longitudinal evolution:
///   B(kappa) = B0 + kappa B1 + kappa^2 B2
/// with B0 = diag(0, -mu_1, ..., -mu_M), B1 = i A [[0, chi^T], [chi, coupling]]
/// (anti-Hermitian), and B2 = -nu^2 I.
struct ModalOperator {
  double nu = 0.0;
  Vec mu;    // size M
  CMat b1;   // (M+1) x (M+1), purely imaginary entries

  int dim() const { return static_cast<int>(mu.size()) + 1; }

  CMat b0() const {
    CMat m = CMat::Zero(dim(), dim());
    for (int n = 1; n < dim(); ++n) m(n, n) = -mu[n - 1];
    return m;
  }

  CMat evaluate(double kappa) const {
    CMat m = kappa * b1;
    for (int n = 1; n < dim(); ++n) m(n, n) -= mu[n - 1];
    const double shift = nu * nu * kappa * kappa;
    for (int n = 0; n < dim(); ++n) m(n, n) -= shift;
    return m;
  }

  /// nu-free part C(kappa) = B0 + kappa B1; the full symbol differs from it by
  /// the scalar shift -nu^2 kappa^2.
  CMat evaluate_nufree(double kappa) const {
    CMat m = kappa * b1;
    for (int n = 1; n < dim(); ++n) m(n, n) -= mu[n - 1];
    return m;
  }
};

inline ModalOperator assemble(const ShearField& field, const CrossSectionSpectrum& spectrum,
                              double nu) {
  require(nu > 0.0, "assemble: nu must be positive");
  require(field.chi.size() == spectrum.mu.size(),
          "assemble: field and spectrum truncation mismatch");
  ModalOperator op;
  op.nu = nu;
  op.mu = spectrum.mu;
  const int d = op.dim();
  const Complex ia(0.0, field.mean_advection);
  op.b1 = CMat::Zero(d, d);
  for (int n = 1; n < d; ++n) {
    op.b1(0, n) = ia * field.chi[n - 1];
    op.b1(n, 0) = ia * field.chi[n - 1];
    for (int m = 1; m < d; ++m) op.b1(n, m) = ia * field.coupling(n - 1, m - 1);
  }
  return op;
}

/// Hermitian / anti-Hermitian split of B(kappa): S = B0 + kappa^2 B2 (real
/// diagonal) and A = kappa B1. S + A == B(kappa) exactly by construction.
inline std::pair<CMat, CMat> split_symmetric(const ModalOperator& op, double kappa) {
  const int d = op.dim();
  CMat s = CMat::Zero(d, d);
  const double shift = op.nu * op.nu * kappa * kappa;
  for (int n = 0; n < d; ++n) s(n, n) = -shift - (n >= 1 ? op.mu[n - 1] : 0.0);
  return {s, kappa * op.b1};
}

/// Exact-in-time propagator e^{B(kappa) T} (scaling-and-squaring Pade).
inline CMat propagator(const ModalOperator& op, double kappa, double t) {
  require(t >= 0.0, "propagator: T must be nonnegative");
  if (t == 0.0) return CMat::Identity(op.dim(), op.dim());
  return (op.evaluate(kappa) * t).exp();
}

/// Defect || e^{B T} - e^{-nu^2 kappa^2 T} e^{C T} || of the scalar-shift
/// factorization, C = B0 + kappa B1. Zero in exact arithmetic.
inline double nu_factorization_check(const ModalOperator& op, double kappa, double t) {
  require(t >= 0.0, "nu_factorization_check: T must be nonnegative");
  CMat full = propagator(op, kappa, t);
  CMat nufree = (op.evaluate_nufree(kappa) * t).exp();
  const double scale = std::exp(-op.nu * op.nu * kappa * kappa * t);
  return (full - scale * nufree).norm();
}

}  // namespace taylorlab
