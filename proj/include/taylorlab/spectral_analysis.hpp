#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "taylorlab/common.hpp"
#include "taylorlab/modal_operator.hpp"

namespace taylorlab {

/// Full spectrum of B(kappa) at one wavenumber, with the continuation branch
/// singled out: its eigenvalue, unit right eigenvector, and rank-1 spectral
/// projection (right x left, normalized so <left, right> = 1).
struct SpectralSlice {
  double kappa = 0.0;
  CVec eigenvalues;   // sorted by descending real part
  Complex leading;    // branch eigenvalue
  CVec leading_vec;   // unit right eigenvector of the branch
  CMat projection;    // rank-1 branch projection
  double gap = 0.0;   // Re(leading) - max Re(rest)
  double condition = 1.0;  // ||left|| ||right|| of the branch pair
};

struct PerturbationReport {
  double gamma2 = 0.0;       // quadratic coefficient of Re(branch), expect -nu_td
  double gamma3_imag = 0.0;  // cubic coefficient of Im(branch), expect r
  double fit_residual = 0.0; // max model deviation over the fitting window
  double window = 0.0;       // |kappa| <= window actually used
};

struct SeparationReport {
  double worst_leading_margin = 0.0;  // min over sweep of threshold - |lambda0 + nu^2 k^2|
  double worst_rest_margin = 0.0;     // min over sweep of -mu1/2 - Re(lambda_rest)
  double worst_leading_margin_nu1 = 0.0;  // same with the linear-nu shift variant
  bool passed = false;
  double offending_kappa = 0.0;
  Complex offending_eigenvalue;
};

namespace detail {

// Eigen-decomposition with left vectors recovered from the inverse of the
// right-eigenvector matrix.
struct EigenPairs {
  CVec values;
  CMat right;
  CMat left;  // rows: left_j . right_k = delta_jk
};

inline EigenPairs decompose(const CMat& m) {
  Eigen::ComplexEigenSolver<CMat> solver(m);
  if (solver.info() != Eigen::Success)
    throw NumericalFailure("eigensolver failed to converge");
  EigenPairs p;
  p.values = solver.eigenvalues();
  p.right = solver.eigenvectors();
  p.left = p.right.inverse();
  return p;
}

inline SpectralSlice make_slice(const ModalOperator& op, double kappa, const CVec& reference) {
  EigenPairs p = decompose(op.evaluate(kappa));
  const int d = op.dim();

  // Branch choice: maximal |<reference, v_j>| over unit right eigenvectors.
  int best = 0, second = -1;
  double best_ov = -1.0, second_ov = -1.0;
  for (int j = 0; j < d; ++j) {
    double ov = std::abs(reference.dot(p.right.col(j)));
    if (ov > best_ov) {
      second = best;
      second_ov = best_ov;
      best = j;
      best_ov = ov;
    } else if (ov > second_ov) {
      second = j;
      second_ov = ov;
    }
  }
  if (second >= 0 && best_ov - second_ov < 1e-6)
    throw NumericalFailure(
        "branch tracking ambiguous: overlaps " + std::to_string(best_ov) + " and " +
        std::to_string(second_ov) + " within 1e-6 (eigenvalues " +
        std::to_string(p.values[best].real()) + ", " + std::to_string(p.values[second].real()) +
        ")");

  SpectralSlice s;
  s.kappa = kappa;
  s.leading = p.values[best];
  s.leading_vec = p.right.col(best);
  s.condition = p.left.row(best).norm() * p.right.col(best).norm();
  if (s.condition > 1e8)
    throw NumericalFailure("branch tracking unreliable: near-defective leading pair");
  s.projection = p.right.col(best) * p.left.row(best);

  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return p.values[a].real() > p.values[b].real(); });
  s.eigenvalues.resize(d);
  for (int j = 0; j < d; ++j) s.eigenvalues[j] = p.values[order[j]];
  double rest = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < d; ++j)
    if (order[j] != best) rest = std::max(rest, p.values[order[j]].real());
  s.gap = s.leading.real() - rest;
  return s;
}

// Least-squares fit of samples (x_i, y_i) against the monomials x^p, p in pows.
inline Vec fit_monomials(const Vec& x, const Vec& y, const std::vector<int>& pows) {
  Mat a(x.size(), static_cast<int>(pows.size()));
  for (int i = 0; i < x.size(); ++i)
    for (size_t c = 0; c < pows.size(); ++c) a(i, c) = std::pow(x[i], pows[c]);
  return a.colPivHouseholderQr().solve(y);
}

}  // namespace detail

/// Spectrum at a single wavenumber; the branch is the eigenvector of maximal
/// overlap with the kappa = 0 constant mode.
inline SpectralSlice spectrum_at(const ModalOperator& op, double kappa) {
  CVec e0 = CVec::Zero(op.dim());
  e0[0] = 1.0;
  return detail::make_slice(op, kappa, e0);
}

/// Continuation along an ascending wavenumber grid: each slice's branch is the
/// eigenvector of maximal overlap with the previous slice's.
inline std::vector<SpectralSlice> leading_branch(const ModalOperator& op, const Vec& grid) {
  std::vector<SpectralSlice> slices;
  slices.reserve(grid.size());
  CVec reference = CVec::Zero(op.dim());
  reference[0] = 1.0;
  for (int i = 0; i < grid.size(); ++i) {
    slices.push_back(detail::make_slice(op, grid[i], reference));
    reference = slices.back().leading_vec;
  }
  return slices;
}

/// Fits the branch expansion lambda0(kappa) = Gamma2 kappa^2 + i Gamma3 kappa^3 + ...
/// over |kappa| <= window. The window shrinks automatically while the fit
/// residual stays above 10x the 1e-6 coefficient tolerance.
inline PerturbationReport perturbation_coefficients(const ModalOperator& op,
                                                    const ShearField& field,
                                                    double kappa0, double window = 0.0) {
  require(field.chi.cwiseAbs().maxCoeff() > 0.0,
          "perturbation_coefficients: shear-free operator is degenerate");
  if (window <= 0.0) window = 0.05 * kappa0;

  PerturbationReport report;
  const int samples = 21;
  for (int attempt = 0; attempt < 4; ++attempt) {
    Vec ks(2 * samples);
    for (int i = 0; i < samples; ++i) {
      double k = window * (i + 1) / samples;
      ks[2 * i] = k;
      ks[2 * i + 1] = -k;
    }
    Vec re(ks.size()), im(ks.size());
    for (int i = 0; i < ks.size(); ++i) {
      Complex lambda = spectrum_at(op, ks[i]).leading;
      re[i] = lambda.real();
      im[i] = lambda.imag();
    }
    Vec cre = detail::fit_monomials(ks, re, {2, 4});
    Vec cim = detail::fit_monomials(ks, im, {3, 5});
    report.gamma2 = cre[0];
    report.gamma3_imag = cim[0];
    report.window = window;
    double resid = 0.0;
    for (int i = 0; i < ks.size(); ++i) {
      double k = ks[i];
      resid = std::max(resid, std::abs(re[i] - cre[0] * k * k - cre[1] * k * k * k * k));
      resid = std::max(resid,
                       std::abs(im[i] - cim[0] * k * k * k - cim[1] * std::pow(k, 5)));
    }
    report.fit_residual = resid;
    if (resid <= 1e-5) return report;
    window *= 0.5;
  }
  throw NumericalFailure("perturbation fit: window too wide or truncation too small (residual " +
                         std::to_string(report.fit_residual) + ")");
}

/// Sweeps |kappa| <= kappa0 and checks the two-cluster split: the branch stays
/// within sqrt(2) mu1 / 2 of -nu^2 kappa^2 while every other eigenvalue keeps
/// Re <= -mu1 / 2. Requires kappa0 below the admissible threshold
/// mu1 / (2 A sup|chi|).
inline SeparationReport separation_check(const ModalOperator& op, const ShearField& field,
                                         double kappa0, double mu1, int samples = 65) {
  require(kappa0 < mu1 / (2.0 * std::abs(field.mean_advection) * field.chi_sup),
          "separation_check: kappa0 outside the admissible range");
  SeparationReport rep;
  rep.worst_leading_margin = std::numeric_limits<double>::infinity();
  rep.worst_leading_margin_nu1 = std::numeric_limits<double>::infinity();
  rep.worst_rest_margin = std::numeric_limits<double>::infinity();
  rep.passed = true;
  const double threshold = std::sqrt(2.0) * mu1 / 2.0;
  for (int i = 0; i < samples; ++i) {
    double kappa = -kappa0 + 2.0 * kappa0 * i / (samples - 1);
    SpectralSlice s = spectrum_at(op, kappa);
    const double shift_sq = op.nu * op.nu * kappa * kappa;
    const double shift_lin = op.nu * kappa * kappa;
    double lead = threshold - std::abs(s.leading + shift_sq);
    double lead_nu1 = threshold - std::abs(s.leading + shift_lin);
    if (lead < rep.worst_leading_margin) rep.worst_leading_margin = lead;
    if (lead_nu1 < rep.worst_leading_margin_nu1) rep.worst_leading_margin_nu1 = lead_nu1;
    for (int j = 0; j < s.eigenvalues.size(); ++j) {
      if (std::abs(s.eigenvalues[j] - s.leading) < 1e-14) continue;
      double margin = -mu1 / 2.0 - s.eigenvalues[j].real();
      if (margin < rep.worst_rest_margin) rep.worst_rest_margin = margin;
      if (margin < 0.0 && rep.passed) {
        rep.passed = false;
        rep.offending_kappa = kappa;
        rep.offending_eigenvalue = s.eigenvalues[j];
      }
    }
    if (lead < 0.0 && rep.passed) {
      rep.passed = false;
      rep.offending_kappa = kappa;
      rep.offending_eigenvalue = s.leading;
    }
  }
  rep.passed = rep.worst_leading_margin >= 0.0 && rep.worst_rest_margin >= 0.0;
  return rep;
}

/// Default band edge: 90% of the admissible bound mu1 / (2 A sup|chi|).
inline double default_kappa0(const ShearField& field, double mu1) {
  require(field.chi_sup > 0.0, "default_kappa0: shear-free field");
  return 0.9 * mu1 / (2.0 * std::abs(field.mean_advection) * field.chi_sup);
}

}  // namespace taylorlab
