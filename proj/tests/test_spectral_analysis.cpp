#include <catch_amalgamated.hpp>

#include <cmath>

#include "taylorlab/spectral_analysis.hpp"

using namespace taylorlab;

namespace {

CrossSectionSpectrum interval_spectrum(int modes) {
  CrossSectionSpec spec;
  spec.modes = modes;
  spec.resolution = 4 * modes + 16;
  return build_spectrum(spec);
}

ShearField cosine_shear(const CrossSectionSpectrum& s, std::initializer_list<double> a) {
  Vec amps(static_cast<int>(a.size()));
  int i = 0;
  for (double v : a) amps[i++] = v;
  return decompose_shear(cosine_profile(s, amps), s);
}

}  // namespace

TEST_CASE("spectrum at kappa = 0 is the diagonal relaxation spectrum") {
  auto s = interval_spectrum(4);
  auto f = cosine_shear(s, {1.0, 1.0});
  auto op = assemble(f, s, 0.1);
  auto slice = spectrum_at(op, 0.0);
  CHECK(std::abs(slice.leading) < 1e-13);
  for (int n = 0; n < 4; ++n)
    CHECK(slice.eigenvalues[n + 1].real() == Catch::Approx(-s.mu[n]).epsilon(1e-12));
  CMat e00 = CMat::Zero(5, 5);
  e00(0, 0) = 1.0;
  CHECK((slice.projection - e00).norm() < 1e-12);
  CHECK(slice.gap == Catch::Approx(kPi * kPi).epsilon(1e-12));
}

TEST_CASE("projection is idempotent with unit trace") {
  auto s = interval_spectrum(6);
  auto f = cosine_shear(s, {1.0, 1.0, 0.5});
  auto op = assemble(f, s, 0.08);
  for (double kappa : {0.05, 0.4, 1.9}) {
    auto slice = spectrum_at(op, kappa);
    CHECK((slice.projection * slice.projection - slice.projection).norm() < 1e-9);
    CHECK(std::abs(slice.projection.trace() - Complex(1.0, 0.0)) < 1e-9);
  }
}

TEST_CASE("shear-free branch is exactly the heat branch") {
  auto s = interval_spectrum(3);
  auto plug = decompose_shear(Vec::Constant(s.weights.size(), 1.0), s);
  auto op = assemble(plug, s, 0.1);
  auto slice = spectrum_at(op, 0.5);
  CHECK(slice.leading.real() == Catch::Approx(-0.0025).epsilon(1e-12));
  CHECK(std::abs(slice.leading.imag()) < 1e-14);

  Vec grid = Vec::LinSpaced(11, 0.0, 1.0);
  auto branch = leading_branch(op, grid);
  for (int i = 0; i < grid.size(); ++i)
    CHECK(branch[i].leading.real() == Catch::Approx(-0.01 * grid[i] * grid[i]).margin(1e-13));
}

TEST_CASE("branch value approximates the enhanced-diffusion parabola") {
  auto s = interval_spectrum(8);
  auto f = cosine_shear(s, {1.0, 1.0});
  auto op = assemble(f, s, 0.1);
  double nu_td = taylor_viscosity(0.1, f);
  auto slice = spectrum_at(op, 0.1);
  CHECK(std::abs(slice.leading.real() + nu_td * 0.01) < 1e-4);
  CHECK(std::abs(slice.leading.imag()) < 1e-8);  // r = 0 profile
}

TEST_CASE("abscissa bound holds across a sweep") {
  auto s = interval_spectrum(16);
  auto f = cosine_shear(s, {1.0, 1.0, 0.5});
  auto op = assemble(f, s, 0.1);
  double kappa0 = default_kappa0(f, s.mu[0]);
  for (int i = 0; i < 64; ++i) {
    double kappa = -2.0 * kappa0 + 4.0 * kappa0 * i / 63.0;
    auto slice = spectrum_at(op, kappa);
    for (int j = 0; j < slice.eigenvalues.size(); ++j)
      CHECK(slice.eigenvalues[j].real() <= -op.nu * op.nu * kappa * kappa + 1e-9);
  }
}

TEST_CASE("imaginary parts stay within |kappa| A sup|chi|") {
  auto s = interval_spectrum(8);
  auto f = cosine_shear(s, {1.0, 1.0, 0.5});
  auto op = assemble(f, s, 0.05);
  double kappa0 = default_kappa0(f, s.mu[0]);
  for (int i = 0; i <= 16; ++i) {
    double kappa = -kappa0 + 2.0 * kappa0 * i / 16.0;
    auto slice = spectrum_at(op, kappa);
    for (int j = 0; j < slice.eigenvalues.size(); ++j) {
      CHECK(std::abs(slice.eigenvalues[j].imag()) <=
            std::abs(kappa) * std::abs(f.mean_advection) * f.chi_sup + 1e-9);
      CHECK(std::abs(slice.eigenvalues[j].imag()) < s.mu[0] / 2.0);
    }
  }
}

TEST_CASE("branch symmetry: even real part, odd imaginary part") {
  auto s = interval_spectrum(8);
  auto f = cosine_shear(s, {1.0, 1.0, 0.5});
  auto op = assemble(f, s, 0.1);
  Vec grid = Vec::LinSpaced(21, -0.2, 0.2);
  auto branch = leading_branch(op, grid);
  for (int i = 0; i < grid.size(); ++i) {
    int mirror = static_cast<int>(grid.size()) - 1 - i;
    CHECK(std::abs(branch[i].leading.real() - branch[mirror].leading.real()) < 1e-10);
    CHECK(std::abs(branch[i].leading.imag() + branch[mirror].leading.imag()) < 1e-10);
  }
}

TEST_CASE("branch projections move continuously along the grid") {
  auto s = interval_spectrum(8);
  auto f = cosine_shear(s, {1.0, 1.0, 0.5});
  auto op = assemble(f, s, 0.1);
  const double dk = 0.02;
  Vec grid = Vec::LinSpaced(26, 0.0, 0.5);
  auto branch = leading_branch(op, grid);
  for (size_t i = 1; i < branch.size(); ++i) {
    double step = (branch[i].projection - branch[i - 1].projection).norm();
    CHECK(step <= 5.0 * dk);  // Lipschitz in kappa with a modest constant
  }
}

TEST_CASE("nu-shift: spectra at two viscosities differ by a scalar") {
  auto s = interval_spectrum(8);
  auto f = cosine_shear(s, {1.0, 1.0, 0.5});
  auto opa = assemble(f, s, 0.05);
  auto opb = assemble(f, s, 0.1);
  for (double kappa : {0.2, 0.8, 2.0}) {
    auto sa = spectrum_at(opa, kappa);
    auto sb = spectrum_at(opb, kappa);
    const double shift = (0.1 * 0.1 - 0.05 * 0.05) * kappa * kappa;
    for (int j = 0; j < sa.eigenvalues.size(); ++j)
      CHECK(std::abs(sa.eigenvalues[j] - shift - sb.eigenvalues[j]) < 1e-9);
    CHECK((sa.projection - sb.projection).norm() < 1e-8);
  }
}

TEST_CASE("perturbation coefficients match the closed-form scalars") {
  auto s = interval_spectrum(16);
  const double nu = 0.1;

  SECTION("shear-free input is rejected") {
    auto plug = decompose_shear(Vec::Constant(s.weights.size(), 1.0), s);
    auto op = assemble(plug, s, nu);
    CHECK_THROWS_AS(perturbation_coefficients(op, plug, 1.0), InvalidInput);
  }

  SECTION("single cosine: Gamma2 = -nu_td, Gamma3 = 0") {
    auto f = cosine_shear(s, {1.0, 1.0});
    auto op = assemble(f, s, nu);
    auto rep = perturbation_coefficients(op, f, default_kappa0(f, s.mu[0]));
    CHECK(rep.gamma2 == Catch::Approx(-taylor_viscosity(nu, f)).margin(1e-6));
    CHECK(rep.gamma3_imag == Catch::Approx(0.0).margin(1e-6));
    CHECK(rep.gamma2 < 0.0);
  }

  SECTION("two cosines: Gamma3 matches the dispersion contraction") {
    auto f = cosine_shear(s, {1.0, 1.0, 0.5});
    auto op = assemble(f, s, nu);
    auto rep = perturbation_coefficients(op, f, default_kappa0(f, s.mu[0]));
    CHECK(rep.gamma2 == Catch::Approx(-taylor_viscosity(nu, f)).margin(1e-6));
    CHECK(rep.gamma3_imag == Catch::Approx(dispersion_r(f, s)).margin(1e-6));
  }
}

TEST_CASE("separation margins over the admissible band") {
  auto s = interval_spectrum(16);

  SECTION("shear-free exact margins") {
    auto plug = decompose_shear(Vec::Constant(s.weights.size(), 1.0), s);
    auto op = assemble(plug, s, 0.1);
    auto rep = separation_check(op, plug, 1.0, s.mu[0], 9);
    CHECK(rep.passed);
    // Leading margin: threshold minus zero (the shifted branch sits at 0).
    CHECK(rep.worst_leading_margin ==
          Catch::Approx(std::sqrt(2.0) * s.mu[0] / 2.0).margin(1e-10));
    // Rest margin: -mu1/2 - (-mu1 - nu^2 kappa^2) at the band edge... minimized at kappa=0.
    CHECK(rep.worst_rest_margin == Catch::Approx(s.mu[0] / 2.0).margin(1e-9));
  }

  SECTION("single cosine at nu = 0.05 passes with positive margin") {
    auto f = cosine_shear(s, {1.0, 1.0});
    auto op = assemble(f, s, 0.05);
    auto rep = separation_check(op, f, default_kappa0(f, s.mu[0]), s.mu[0]);
    CHECK(rep.passed);
    CHECK(rep.worst_leading_margin > 0.0);
    CHECK(rep.worst_rest_margin > 0.0);
  }

  SECTION("inadmissible kappa0 is rejected") {
    auto f = cosine_shear(s, {1.0, 1.0});
    auto op = assemble(f, s, 0.05);
    CHECK_THROWS_AS(separation_check(op, f, 10.0 * default_kappa0(f, s.mu[0]), s.mu[0]),
                    InvalidInput);
  }
}
