#include <cmath>
#include <functional>
#include <vector>

#include "coulomb/exactpf.hpp"
#include "coulomb/expansion.hpp"
#include "doctest.h"

using namespace coulomb;
using namespace coulomb::expansion;
using geometry::make_grid;

namespace {

const double kLn2 = std::log(2.0);
const double kLn2Pi = std::log(kTwoPi);

// Composite Simpson on [-1, 1].
double simpson(const std::function<double(double)>& f, int n = 20000) {
  const double h = 2.0 / n;
  double s = f(-1.0) + f(1.0);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(-1.0 + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("eval_expansion") {
  ExpansionCoefficients c;
  c.quad = 1.0;
  c.nlogn = 0.0;
  CHECK(eval_expansion(c, 3.0) == doctest::Approx(9.0));
  c = ExpansionCoefficients{};
  c.linear = 2.0;
  c.logn = 1.0;
  c.constant = 0.5;
  CHECK(eval_expansion(c, 1.0) == doctest::Approx(2.5));
  CHECK(eval_expansion(c, std::exp(1.0)) == doctest::Approx(-0.5 * std::exp(1.0) + 2.0 * std::exp(1.0) + 1.5));
  CHECK_THROWS_AS(eval_expansion(c, 0.0), DomainError);
}

TEST_CASE("bosonization constants and faltings delta") {
  const double zp = specfun::zeta_prime_minus1();
  const double c0 = -24.0 * zp + 1.0 - 6.0 * kLn2Pi - 2.0 * kLn2;
  CHECK(c0_constant() == doctest::Approx(c0).epsilon(1e-15));
  CHECK(c1_constant() == doctest::Approx(-8.0 * kLn2Pi).epsilon(1e-15));
  CHECK(ln_b_gk(0, 0).ln_b == doctest::Approx(c0 / 4.0).epsilon(1e-15));
  CHECK(ln_b_gk(0, 7).ln_b == doctest::Approx(-7.0 * kLn2Pi + c0 / 4.0).epsilon(1e-15));
  CHECK(ln_b_gk(1, 3).ln_b == doctest::Approx(-3.0 * kLn2Pi).epsilon(1e-15));
  CHECK(ln_b_gk(1, 3).c_g == doctest::Approx(-8.0 * kLn2Pi).epsilon(1e-15));
  CHECK(ln_b_gk(2, 2).c_g == doctest::Approx(-c0 - 16.0 * kLn2Pi).epsilon(1e-15));
  CHECK_THROWS_AS(ln_b_gk(2, 1), DomainError);
  CHECK_THROWS_AS(ln_b_gk(-1, 1), DomainError);

  CHECK(faltings_delta(SurfaceSpec::sphere()) == 0.0);
  CHECK(std::abs(faltings_delta_assembled(SurfaceSpec::sphere())) < 1e-13);
  const SurfaceSpec ti = SurfaceSpec::torus(cplx(0, 1));
  const double eta = std::tgamma(0.25) / (2.0 * std::pow(kPi, 0.75));
  CHECK(faltings_delta(ti) == doctest::Approx(-24.0 * std::log(eta) - 8.0 * kLn2Pi).epsilon(1e-14));
  for (cplx tau : {cplx(0, 1), cplx(0, 2), cplx(0.3, 1.7)}) {
    const SurfaceSpec s = SurfaceSpec::torus(tau);
    CHECK(faltings_delta_assembled(s) == doctest::Approx(faltings_delta(s)).epsilon(1e-13));
  }
}

TEST_CASE("sphere coefficients without potential") {
  const auto g = make_grid(SurfaceSpec::sphere(), 32);
  const double zp = specfun::zeta_prime_minus1();
  // Stirling and Barnes expansions of the closed form.
  const double linear = 0.5 + std::log(kPi) + 0.5 * kLn2Pi;
  const ExpansionCoefficients m = coeffs_modified(SurfaceSpec::sphere(), PotentialSpec::zero(), g);
  CHECK(m.variable == ExpansionCoefficients::Variable::in_k);
  CHECK(m.kind == ExpansionCoefficients::Kind::modified);
  CHECK(m.quad == 0.0);
  CHECK(m.nlogn == -0.5);
  CHECK(m.logn == doctest::Approx(-2.0 / 3.0));
  CHECK(m.linear == doctest::Approx(linear).epsilon(1e-12));
  CHECK(m.linear == doctest::Approx(2.56366841905407).epsilon(1e-12));
  CHECK(m.constant == doctest::Approx(1.64949279831968).epsilon(1e-12));

  const ExpansionCoefficients p = coeffs_plain(SurfaceSpec::sphere(), PotentialSpec::zero(), g);
  CHECK(p.variable == ExpansionCoefficients::Variable::in_n);
  CHECK(p.kind == ExpansionCoefficients::Kind::plain);
  CHECK(p.linear == doctest::Approx(linear).epsilon(1e-12));
  CHECK(p.logn == doctest::Approx(-1.0 / 6.0).epsilon(1e-14));
  CHECK(p.constant == doctest::Approx(2.0 * zp - 1.0 / 12.0).epsilon(1e-12));

  // Residual decays like 1 / N.
  double prev = 1.0;
  for (int n : {20, 50, 100, 200, 400}) {
    const double r = std::abs(exactpf::ln_z_sphere_exact(n) - eval_expansion(p, n));
    CHECK(r < prev);
    CHECK(r * n < 1e-3);
    prev = r;
  }
  CHECK(prev < 1e-7);
}

TEST_CASE("torus coefficients are exact") {
  for (cplx tau : {cplx(0, 1), cplx(0, 2), cplx(0.3, 1.7)}) {
    const SurfaceSpec s = SurfaceSpec::torus(tau);
    const auto g = make_grid(s, 16);
    const double eta2 = std::norm(s.eta());
    const ExpansionCoefficients m = coeffs_modified(s, PotentialSpec::zero(), g);
    CHECK(m.linear == doctest::Approx(std::log(2.0 * kPi * kPi * std::sqrt(2.0 * s.im_tau()) * eta2)).epsilon(1e-13));
    CHECK(std::abs(m.logn) < 1e-15);
    CHECK(m.constant == doctest::Approx(std::log(eta2)).epsilon(1e-13));
    const ExpansionCoefficients p = coeffs_plain(s, PotentialSpec::zero(), g);
    CHECK(p.constant - m.constant == doctest::Approx(0.5 * std::log(s.im_tau()) + 0.5 * kLn2).epsilon(1e-13));
    const auto pm = specfun::PeriodMatrix::genus1(tau);
    for (int n = 2; n <= 50; ++n) {
      const double exact = exactpf::ln_z_theta_torus_exact(n, s.modulus());
      CHECK(std::abs(exact - eval_expansion(m, n)) < 1e-10);
      CHECK(std::abs(exactpf::partition_from_modified(exact, 1, pm) - eval_expansion(p, n)) < 1e-10);
    }
  }
}

TEST_CASE("conversion from k to N") {
  ExpansionCoefficients m;
  m.quad = 0.3;
  m.nlogn = -0.5;
  m.linear = 1.1;
  m.logn = 2.0 / 3.0;
  m.constant = -0.4;
  for (int g : {0, 1, 2, 3}) {
    const ExpansionCoefficients n = to_n(m, g);
    // Same function, up to O(ln N / N), after k = N + g - 1.
    const double big = 1e5;
    const double k = big + g - 1.0;
    const double lhs = eval_expansion(m, k);
    const double rhs = eval_expansion(n, big);
    CHECK(std::abs(lhs - rhs) < 1e-3);
    CHECK(n.logn == doctest::Approx(2.0 / 3.0 - 0.5 * (g - 1.0)));
    CHECK_THROWS_AS(to_n(n, g), DomainError);
  }
  // Plain log N coefficient: -1/6, 0, 1/6 for g = 0, 1, 2.
  for (int g : {0, 1, 2}) {
    ExpansionCoefficients a = assemble_modified(g, ArakelovInputs{}, PotentialInputs{});
    CHECK(to_plain(a, g, 0.0).logn == doctest::Approx((g - 1.0) / 6.0).epsilon(1e-15));
  }
}

TEST_CASE("bosonization closure on the sphere") {
  const double det_ar = exactpf::det_scalar_laplacian(SurfaceSpec::sphere(), exactpf::ScalarMetric::arakelov);
  for (int n = 1; n <= 50; ++n) {
    const double rhs = exactpf::ln_det_magnetic_sphere(n - 1) - ln_b_gk(0, n - 1).ln_b +
                       0.5 * (det_ar - std::log(kPi * std::exp(1.0)));
    CHECK(std::abs(exactpf::ln_z_sphere_exact(n) - rhs) < 1e-10);
  }
}

TEST_CASE("potential inputs for zonal potentials") {
  const auto g = make_grid(SurfaceSpec::sphere(), 64);
  for (int p : {1, 2}) {
    for (double a : {0.05, 0.1}) {
      INFO("p = ", p, " a = ", a);
      const PotentialSpec v = PotentialSpec::sphere_zonal(p, a);
      const PotentialInputs in = potential_inputs(v, g);
      // Height w, du = dw / 2, Delta w^p = 4 pi [p (p+1) w^p - p (p-1) w^(p-2)].
      auto lap = [&](double w) {
        return a * 4.0 * kPi * (p * (p + 1.0) * std::pow(w, p) - (p > 1 ? p * (p - 1.0) * std::pow(w, p - 2) : 0.0));
      };
      auto f = [&](double w) { return 1.0 + lap(w) / (4.0 * kPi); };
      auto df = [&](double w) {
        return a * (p * (p + 1.0) * p * std::pow(w, p - 1) - (p > 2 ? p * (p - 1.0) * (p - 2.0) * std::pow(w, p - 3) : 0.0));
      };
      const double int_v = simpson([&](double w) { return a * std::pow(w, p); }) / 2.0;
      const double vlapv = simpson([&](double w) { return a * std::pow(w, p) * lap(w); }) / 2.0;
      CHECK(in.quad == doctest::Approx(vlapv / (8.0 * kPi) + int_v).epsilon(1e-9));
      if (p == 1) CHECK(in.quad == doctest::Approx(a * a / 3.0).epsilon(1e-9));

      const double flnf = simpson([&](double w) { return f(w) * std::log(f(w)); }) / 2.0;
      CHECK(in.linear == doctest::Approx(-0.5 * flnf + int_v).epsilon(1e-9));

      const double lnf = simpson([&](double w) { return std::log(f(w)); }) / 2.0;
      // Dirichlet energy of a zonal h: integral of 4 pi (1 - w^2) h'^2 dw / 2.
      const double dir = simpson([&](double w) { return 2.0 * kPi * (1.0 - w * w) * std::pow(df(w) / f(w), 2); });
      CHECK(in.constant == doctest::Approx(-2.0 / 3.0 * lnf + dir / (48.0 * kPi)).epsilon(1e-8));
    }
  }
  const PotentialInputs zero = potential_inputs(PotentialSpec::zero(), g);
  CHECK(zero.quad == 0.0);
  CHECK(zero.linear == 0.0);
  CHECK(zero.constant == 0.0);
}

TEST_CASE("theta lemma") {
  for (cplx tau : {cplx(0, 1), cplx(0, 2), cplx(0.3, 1.7)}) {
    const auto [num, closed] = theta_integral_check(specfun::PeriodMatrix::genus1(tau), 256);
    CHECK(closed == doctest::Approx(1.0 / std::sqrt(2.0 * tau.imag())).epsilon(1e-15));
    CHECK(std::abs(num - closed) < 1e-8);
  }
  const cplx diag[] = {cplx(0, 1), cplx(0, 2)};
  const auto [num2, closed2] = theta_integral_check(specfun::PeriodMatrix::diagonal(diag), 16);
  CHECK(closed2 == doctest::Approx(1.0 / std::sqrt(8.0)).epsilon(1e-15));
  // A diagonal period matrix factorizes into genus-one averages.
  const double g1 = theta_integral_check(specfun::PeriodMatrix::genus1(cplx(0, 1)), 16).first;
  const double g2 = theta_integral_check(specfun::PeriodMatrix::genus1(cplx(0, 2)), 16).first;
  CHECK(num2 == doctest::Approx(g1 * g2).epsilon(1e-12));
  CHECK(std::abs(num2 - closed2) < 1e-6);
  CHECK_THROWS_AS(theta_integral_check(specfun::PeriodMatrix::genus1(cplx(0, 1)), 1), DomainError);
}

TEST_CASE("numeric genus guard") {
  const auto g = make_grid(SurfaceSpec::sphere(), 16);
  CHECK_THROWS_AS(coeffs_modified(SurfaceSpec::torus(cplx(0, 1)), PotentialSpec::zero(), g), DomainError);
}
