#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "taylorlab/common.hpp"
#include "taylorlab/quadrature.hpp"

namespace taylorlab {

enum class CrossSectionFamily {
  kInterval,   // unit interval with zero-flux ends
  kRectangle,  // unit-area rectangle with zero-flux sides
  kExplicit,   // user-supplied spectral data
};

/// Spectral data supplied by the user for the explicit family: eigenvalues,
/// a quadrature rule on the cross-section, and eigenfunction samples at the
/// quadrature nodes (row n = mode n, row 0 must be the constant mode).
struct ExplicitSpectrumData {
  Vec mu;        // ascending, strictly positive, one entry per nonconstant mode
  Mat psi;       // (modes+1) x nodes eigenfunction values, row 0 == 1
  Mat nodes;     // nodes x dim coordinates (carried through for bookkeeping)
  Vec weights;   // quadrature weights, must sum to 1 (unit-area convention)
};

struct CrossSectionSpec {
  CrossSectionFamily family = CrossSectionFamily::kInterval;
  int modes = 16;            // number of nonconstant modes retained
  int resolution = 64;       // quadrature points per dimension
  double aspect = 1.0;       // rectangle side ratio Lx/Ly (area fixed to 1)
  ExplicitSpectrumData explicit_data;  // used only by the explicit family

  void validate() const {
    require(modes >= 1, "cross-section: modes must be >= 1");
    require(resolution >= 4 * modes,
            "cross-section: quadrature resolution must be >= 4*modes");
    require(aspect > 0.0, "cross-section: aspect must be positive");
  }
};

/// Orthonormal zero-flux eigenbasis of a unit-area cross-section. The constant
/// mode (index 0, eigenvalue 0) is stored in row 0 of `psi`; rows 1..M hold the
/// nonconstant modes with eigenvalues mu(0) <= ... <= mu(M-1).
struct CrossSectionSpectrum {
  Vec mu;       // size M, ascending, strictly positive
  Mat psi;      // (M+1) x Q eigenfunction values at quadrature nodes
  Mat nodes;    // Q x dim node coordinates
  Vec weights;  // size Q, sums to 1

  int modes() const { return static_cast<int>(mu.size()); }

  double integrate(const Vec& values) const { return weights.dot(values); }

  /// <psi_n, f> against the stored quadrature.
  double project(int n, const Vec& values) const {
    return (weights.array() * psi.row(n).transpose().array() * values.array()).sum();
  }

  /// Worst off-diagonal / diagonal-defect entry of the quadrature Gram matrix.
  double gram_defect() const {
    const int m = modes();
    double worst = 0.0;
    for (int i = 0; i <= m; ++i)
      for (int j = i; j <= m; ++j) {
        double g = (weights.array() * psi.row(i).transpose().array() *
                    psi.row(j).transpose().array())
                       .sum();
        worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
      }
    return worst;
  }
};

namespace detail {

inline CrossSectionSpectrum build_interval(const CrossSectionSpec& spec) {
  CrossSectionSpectrum s;
  const int m = spec.modes;
  const int panels = (spec.resolution + 11) / 12;
  QuadratureRule rule = composite_gauss_legendre(0.0, 1.0, panels);
  const int q = static_cast<int>(rule.nodes.size());
  s.nodes = rule.nodes;
  s.weights = rule.weights;
  s.mu.resize(m);
  s.psi.resize(m + 1, q);
  s.psi.row(0).setOnes();
  const double root2 = std::sqrt(2.0);
  for (int n = 1; n <= m; ++n) {
    s.mu[n - 1] = n * n * kPi * kPi;
    for (int i = 0; i < q; ++i) s.psi(n, i) = root2 * std::cos(n * kPi * rule.nodes[i]);
  }
  return s;
}

inline CrossSectionSpectrum build_rectangle(const CrossSectionSpec& spec) {
  // Sides Lx * Ly = 1 with Lx/Ly = aspect.
  const double lx = std::sqrt(spec.aspect);
  const double ly = 1.0 / lx;
  const int m = spec.modes;
  const int panels = (spec.resolution + 11) / 12;
  QuadratureRule ry = composite_gauss_legendre(0.0, lx, panels);
  QuadratureRule rz = composite_gauss_legendre(0.0, ly, panels);
  const int qy = static_cast<int>(ry.nodes.size());
  const int qz = static_cast<int>(rz.nodes.size());

  // Enumerate tensor modes (p, q) != (0, 0); ascending eigenvalue, ties broken
  // lexicographically so degenerate pairs keep a reproducible order.
  struct ModeId {
    int p, q;
    double mu;
  };
  std::vector<ModeId> ids;
  const int span = m + 2;  // enough candidates to cover the first m eigenvalues
  for (int p = 0; p <= span; ++p)
    for (int q = 0; q <= span; ++q) {
      if (p == 0 && q == 0) continue;
      double mu = kPi * kPi * (p * p / (lx * lx) + q * q / (ly * ly));
      ids.push_back({p, q, mu});
    }
  std::sort(ids.begin(), ids.end(), [](const ModeId& a, const ModeId& b) {
    if (a.mu != b.mu) return a.mu < b.mu;
    if (a.p != b.p) return a.p < b.p;
    return a.q < b.q;
  });

  CrossSectionSpectrum s;
  s.mu.resize(m);
  s.nodes.resize(qy * qz, 2);
  s.weights.resize(qy * qz);
  s.psi.resize(m + 1, qy * qz);
  for (int i = 0; i < qy; ++i)
    for (int j = 0; j < qz; ++j) {
      const int idx = i * qz + j;
      s.nodes(idx, 0) = ry.nodes[i];
      s.nodes(idx, 1) = rz.nodes[j];
      s.weights[idx] = ry.weights[i] * rz.weights[j];
    }
  s.psi.row(0).setOnes();
  for (int n = 1; n <= m; ++n) {
    const ModeId& id = ids[n - 1];
    s.mu[n - 1] = id.mu;
    const double cp = (id.p == 0) ? 1.0 : std::sqrt(2.0);
    const double cq = (id.q == 0) ? 1.0 : std::sqrt(2.0);
    for (int i = 0; i < qy; ++i)
      for (int j = 0; j < qz; ++j) {
        const int idx = i * qz + j;
        // Normalization includes 1/sqrt(area) factors, area = lx*ly = 1.
        s.psi(n, idx) = cp * std::cos(id.p * kPi * ry.nodes[i] / lx) / std::sqrt(lx) *
                        cq * std::cos(id.q * kPi * rz.nodes[j] / ly) / std::sqrt(ly) *
                        std::sqrt(lx * ly);
      }
  }
  return s;
}

}  // namespace detail

/// Builds the cross-sectional eigenbasis for the requested family.
/// Explicit data is validated: eigenvalues must ascend and the quadrature Gram
/// matrix of the samples must be orthonormal to 1e-8.
inline CrossSectionSpectrum build_spectrum(const CrossSectionSpec& spec) {
  spec.validate();
  CrossSectionSpectrum s;
  switch (spec.family) {
    case CrossSectionFamily::kInterval:
      s = detail::build_interval(spec);
      break;
    case CrossSectionFamily::kRectangle:
      s = detail::build_rectangle(spec);
      break;
    case CrossSectionFamily::kExplicit: {
      const ExplicitSpectrumData& d = spec.explicit_data;
      require(d.mu.size() >= spec.modes, "explicit spectrum: too few modes");
      require(d.psi.rows() >= spec.modes + 1, "explicit spectrum: psi rows");
      require(d.psi.cols() == d.weights.size(), "explicit spectrum: node count");
      s.mu = d.mu.head(spec.modes);
      s.psi = d.psi.topRows(spec.modes + 1);
      s.nodes = d.nodes;
      s.weights = d.weights;
      for (int n = 1; n < s.mu.size(); ++n)
        require(s.mu[n] >= s.mu[n - 1], "explicit spectrum: eigenvalues must ascend");
      require(s.mu.minCoeff() > 0.0, "explicit spectrum: eigenvalues must be positive");
      double defect = s.gram_defect();
      if (defect > 1e-8)
        throw InvalidInput("explicit spectrum: quadrature Gram defect " +
                           std::to_string(defect) + " exceeds 1e-8");
      break;
    }
  }
  return s;
}

/// Shear profile decomposed against a cross-section basis. V = A (1 + chi)
/// with chi of zero cross-sectional average.
struct ShearField {
  double mean_advection = 0.0;  // A
  Vec chi;                      // chi_n, n = 1..M
  Mat coupling;                 // chi_{n,m} = <psi_n, chi psi_m>, symmetric
  double mu_norm_sq = 0.0;      // sum_m chi_m^2 / mu_m
  double d_td = 0.0;            // A^2 * mu_norm_sq
  double chi_sup = 0.0;         // sup |chi| over quadrature nodes
  double chi_l2 = 0.0;          // l2 norm of the retained chi_n
};

/// Decomposes a pointwise velocity profile (sampled on the spectrum's
/// quadrature nodes) into mean advection plus shear coefficients.
/// A profile with |mean| < 1e-12 is rejected: the normalization V = A(1+chi)
/// degenerates and no enhanced-diffusion scalars can be formed.
inline ShearField decompose_shear(const Vec& profile, const CrossSectionSpectrum& spectrum) {
  require(profile.size() == spectrum.weights.size(),
          "decompose_shear: profile must be sampled on the quadrature nodes");
  ShearField f;
  f.mean_advection = spectrum.integrate(profile);
  if (std::abs(f.mean_advection) < 1e-12)
    throw InvalidInput("zero-mean profile: Taylor mechanism degenerate");

  Vec chi_pointwise = profile / f.mean_advection;
  chi_pointwise.array() -= 1.0;
  // Remove any quadrature-level constant component so <chi, 1> = 0 exactly.
  chi_pointwise.array() -= spectrum.integrate(chi_pointwise);

  const int m = spectrum.modes();
  f.chi.resize(m);
  f.coupling.resize(m, m);
  for (int n = 1; n <= m; ++n) f.chi[n - 1] = spectrum.project(n, chi_pointwise);
  for (int n = 1; n <= m; ++n)
    for (int k = n; k <= m; ++k) {
      double v = (spectrum.weights.array() * spectrum.psi.row(n).transpose().array() *
                  chi_pointwise.array() * spectrum.psi.row(k).transpose().array())
                     .sum();
      f.coupling(n - 1, k - 1) = v;
      f.coupling(k - 1, n - 1) = v;
    }
  f.mu_norm_sq = (f.chi.array().square() / spectrum.mu.array()).sum();
  f.d_td = f.mean_advection * f.mean_advection * f.mu_norm_sq;
  f.chi_sup = chi_pointwise.array().abs().maxCoeff();
  f.chi_l2 = f.chi.norm();
  return f;
}

/// Builds a ShearField directly from spectral data (mean advection, shear
/// coefficients and coupling table), bypassing quadrature. Used by the
/// explicit-spectral-data input route.
inline ShearField shear_from_spectral_data(double mean_advection, const Vec& chi,
                                           const Mat& coupling, const Vec& mu) {
  require(chi.size() == mu.size(), "shear data: chi/mu size mismatch");
  require(coupling.rows() == chi.size() && coupling.cols() == chi.size(),
          "shear data: coupling must be MxM");
  require(std::abs(mean_advection) >= 1e-12,
          "zero-mean profile: Taylor mechanism degenerate");
  double asym = (coupling - coupling.transpose()).cwiseAbs().maxCoeff();
  require(asym <= 1e-10, "shear data: coupling table must be symmetric");
  ShearField f;
  f.mean_advection = mean_advection;
  f.chi = chi;
  f.coupling = 0.5 * (coupling + coupling.transpose());
  f.mu_norm_sq = (chi.array().square() / mu.array()).sum();
  f.d_td = mean_advection * mean_advection * f.mu_norm_sq;
  // Without pointwise samples the best available sup-norm surrogate is the
  // spectral norm of the coupling table (a lower bound on ||chi||_inf).
  Eigen::SelfAdjointEigenSolver<Mat> es(f.coupling);
  f.chi_sup = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), chi.norm());
  f.chi_l2 = chi.norm();
  return f;
}

/// Effective longitudinal diffusivity nu^2 + A^2 ||chi||_mu^2.
inline double taylor_viscosity(double nu, const ShearField& field) {
  require(nu > 0.0, "taylor_viscosity: nu must be positive");
  return nu * nu + field.d_td;
}

/// Cubic dispersion coefficient r = -A^3 chi . [coupling (chi / mu)], the
/// imaginary third-order coefficient of the leading dispersion branch.
inline double dispersion_r(const ShearField& field, const CrossSectionSpectrum& spectrum) {
  require(field.chi.size() == spectrum.mu.size(), "dispersion_r: field/spectrum mismatch");
  const double a = field.mean_advection;
  Vec upsilon_inv_chi = field.chi.array() / spectrum.mu.array();
  return -a * a * a * field.chi.dot(field.coupling * upsilon_inv_chi);
}

struct OperatorNormBounds {
  double upsilon_inv = 0.0;  // 1 / mu_1
  double chi_conv = 0.0;     // spectral norm of the coupling table
};

/// Norm bounds for the mode-space operators: the inverse eigenvalue scaling is
/// bounded by 1/mu_1 and the coupling table's spectral norm must not exceed
/// sup |chi| (up to quadrature slack 1e-8); a violation means the shear
/// decomposition is inconsistent.
inline OperatorNormBounds operator_norm_bounds(const ShearField& field,
                                               const CrossSectionSpectrum& spectrum) {
  OperatorNormBounds b;
  b.upsilon_inv = 1.0 / spectrum.mu[0];
  Eigen::SelfAdjointEigenSolver<Mat> es(field.coupling);
  b.chi_conv = es.eigenvalues().cwiseAbs().maxCoeff();
  if (b.chi_conv > field.chi_sup + 1e-8)
    throw NumericalFailure("coupling spectral norm exceeds sup |chi|: inconsistent shear");
  return b;
}

/// Pointwise samples of the named built-in profiles on the quadrature nodes.
/// 1-D cosine family: V(y) = amps[0] + sum_j amps[j] cos(j pi y).
inline Vec cosine_profile(const CrossSectionSpectrum& spectrum, const Vec& amps) {
  require(spectrum.nodes.cols() == 1, "cosine_profile: needs a 1-D cross-section");
  const int q = static_cast<int>(spectrum.weights.size());
  Vec v = Vec::Constant(q, amps[0]);
  for (int j = 1; j < amps.size(); ++j)
    for (int i = 0; i < q; ++i) v[i] += amps[j] * std::cos(j * kPi * spectrum.nodes(i, 0));
  return v;
}

}  // namespace taylorlab
