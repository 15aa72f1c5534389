#include <cmath>
#include <random>
#include <vector>

#include "coulomb/specfun.hpp"
#include "doctest.h"

using namespace coulomb;
using namespace coulomb::specfun;

namespace {

// Jacobi triple product with nome q = exp(i pi tau).
cplx theta1_product(cplx z, cplx tau) {
  const cplx q = std::exp(cplx(0, kPi) * tau);
  cplx prod = 2.0 * std::exp(cplx(0, kPi / 4.0) * tau) * std::sin(kPi * z);
  for (int n = 1; n < 200; ++n) {
    const cplx q2n = std::pow(q, 2.0 * n);
    prod *= (1.0 - q2n) * (1.0 - 2.0 * q2n * std::cos(kTwoPi * z) + q2n * q2n);
  }
  return prod;
}

double one_dim_theta_sum() {
  double s = 0.0;
  for (int n = -30; n <= 30; ++n) s += std::exp(-kPi * n * n);
  return s;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("jacobi theta1: zero, oddness and triple product") {
  const TorusModulus i(cplx(0, 1));
  CHECK(std::abs(jacobi_theta1(0.0, i)) < 1e-15);
  const cplx z(0.3, 0.1);
  CHECK(std::abs(jacobi_theta1(-z, i) + jacobi_theta1(z, i)) < 1e-13);
  CHECK(rel(jacobi_theta1(0.25, i), theta1_product(0.25, cplx(0, 1))) < 1e-12);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0), t(0.5, 3.0);
  for (int k = 0; k < 100; ++k) {
    const cplx tau(0.5 * u(rng), t(rng));
    const cplx w(u(rng), 0.5 * u(rng));
    const TorusModulus m(tau);
    const cplx a = jacobi_theta1(w, m);
    CHECK(std::abs(a + jacobi_theta1(-w, m)) <= 1e-12 * std::max(1.0, std::abs(a)));
    CHECK(rel(a, theta1_product(w, tau)) < 1e-11);
  }
}

TEST_CASE("dedekind eta") {
  const cplx eta_i = dedekind_eta(TorusModulus(cplx(0, 1)));
  const double closed = std::tgamma(0.25) / (2.0 * std::pow(kPi, 0.75));
  CHECK(std::abs(eta_i - closed) < 1e-14);
  CHECK(eta_i.real() == doctest::Approx(0.7682254223260566).epsilon(1e-15));
  const cplx eta_2i = dedekind_eta(TorusModulus(cplx(0, 2)));
  CHECK(std::abs(eta_2i - eta_i / std::pow(2.0, 0.375)) < 1e-14);
  const cplx tau(0.3, 1.2);
  CHECK(std::abs(std::abs(dedekind_eta(TorusModulus(tau + 1.0))) - std::abs(dedekind_eta(TorusModulus(tau)))) < 1e-14);
}

TEST_CASE("torus modulus and period matrix validation") {
  CHECK_THROWS_AS(TorusModulus(cplx(0.2, 0.0)), DomainError);
  CHECK_THROWS_AS(TorusModulus(cplx(0.2, -1.0)), DomainError);
  CHECK_THROWS_AS(TorusModulus(cplx(NAN, 1.0)), DomainError);
  CHECK_THROWS_AS(PeriodMatrix(2, {cplx(0, 1), cplx(0.1, 0), cplx(0.2, 0), cplx(0, 1)}), DomainError);
  CHECK_THROWS_AS(PeriodMatrix(2, {cplx(0, 1), cplx(0, 2), cplx(0, 2), cplx(0, 1)}), DomainError);
  CHECK_THROWS_AS(jacobi_theta1(cplx(INFINITY, 0), TorusModulus(cplx(0, 1))), DomainError);
}

TEST_CASE("riemann theta") {
  const double s = one_dim_theta_sum();
  CHECK(s == doctest::Approx(1.0864348112133080).epsilon(1e-15));
  const cplx diag[] = {cplx(0, 1), cplx(0, 1)};
  const PeriodMatrix t2 = PeriodMatrix::diagonal(diag);
  const std::vector<cplx> zero2(2, 0.0);
  CHECK(std::abs(riemann_theta(zero2, t2) - s * s) < 1e-14);
  const std::vector<cplx> zero1(1, 0.0);
  CHECK(std::abs(riemann_theta(zero1, PeriodMatrix::genus1(cplx(0, 1))) - s) < 1e-15);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const std::vector<cplx> z{cplx(u(rng), 0.3 * u(rng)), cplx(u(rng), 0.3 * u(rng))};
    const std::vector<cplx> mz{-z[0], -z[1]};
    CHECK(rel(riemann_theta(mz, t2), riemann_theta(z, t2)) < 1e-13);
  }
  CHECK(theta_box_radius(1.0) == static_cast<int>(std::ceil(std::sqrt(16.0 * std::log(10.0) / kPi))) + 2);
}

TEST_CASE("theta norm: real points and lattice invariance") {
  const PeriodMatrix t1 = PeriodMatrix::genus1(cplx(0, 1));
  const std::vector<cplx> real_z{cplx(0.37, 0.0)};
  CHECK(theta_norm_sq(real_z, t1) == doctest::Approx(std::norm(riemann_theta(real_z, t1))).epsilon(1e-14));

  const std::vector<cplx> z{cplx(0.21, 0.17)};
  const double base = theta_norm_sq(z, t1);
  CHECK(std::abs(theta_norm_sq(std::vector<cplx>{z[0] + 1.0}, t1) - base) < 1e-12);
  CHECK(std::abs(theta_norm_sq(std::vector<cplx>{z[0] + cplx(0, 1)}, t1) - base) < 1e-12);

  const cplx tau(0.3, 1.1);
  const PeriodMatrix g1 = PeriodMatrix::genus1(tau);
  const PeriodMatrix g2(2, {cplx(0.1, 1.0), cplx(0.2, 0.3), cplx(0.2, 0.3), cplx(-0.1, 1.5)});
  const std::vector<cplx> z1{cplx(0.13, 0.27)};
  const std::vector<cplx> z2{cplx(0.13, 0.27), cplx(-0.31, 0.05)};
  const double n1 = theta_norm_sq(z1, g1), n2 = theta_norm_sq(z2, g2);
  for (int m = -2; m <= 2; ++m) {
    for (int n = -2; n <= 2; ++n) {
      const std::vector<cplx> s1{z1[0] + static_cast<double>(m) + static_cast<double>(n) * tau};
      CHECK(std::abs(theta_norm_sq(s1, g1) - n1) <= 1e-10 * n1);
      // Shift by m e_1 + tau (n e_2).
      const std::vector<cplx> s2{z2[0] + static_cast<double>(m) + static_cast<double>(n) * g2(0, 1),
                                 z2[1] + static_cast<double>(n) * g2(1, 1)};
      CHECK(std::abs(theta_norm_sq(s2, g2) - n2) <= 1e-10 * n2);
    }
  }
}

TEST_CASE("theta with characteristics") {
  const TorusModulus i(cplx(0, 1));
  const cplx z(0.2, 0.05);
  const std::vector<cplx> zv{z};
  CHECK(std::abs(theta_with_char({0, 1, 0, 1}, z, i) - riemann_theta(zv, PeriodMatrix::genus1(cplx(0, 1)))) < 1e-14);
  CHECK(std::abs(std::abs(theta_with_char({1, 2, 1, 2}, 0.2, i)) - std::abs(jacobi_theta1(0.2, i))) < 1e-14);
  const TorusModulus two_i(cplx(0, 2));
  CHECK(std::abs(theta_with_char({1, 1, 0, 1}, 0.1, two_i) - theta_with_char({0, 1, 0, 1}, 0.1, two_i)) < 1e-14);
}

TEST_CASE("hurwitz zeta") {
  CHECK(hurwitz_zeta(2.0, 1.0) == doctest::Approx(kPi * kPi / 6.0).epsilon(1e-14));
  CHECK(hurwitz_zeta(3.0, 1.0) == doctest::Approx(1.2020569031595942).epsilon(1e-14));
  CHECK(hurwitz_zeta(4.0, 1.0) == doctest::Approx(std::pow(kPi, 4) / 90.0).epsilon(1e-14));
  CHECK(std::abs(hurwitz_zeta(-1.0, 1.0) + 1.0 / 12.0) < 1e-12);
  CHECK(hurwitz_zeta(0.0, 5.0) == doctest::Approx(-4.5).epsilon(1e-14));
  for (int a = 2; a <= 40; ++a) CHECK(std::abs(hurwitz_zeta(0.0, a) - (0.5 - a)) < 1e-12);

  // Direct summation with the Euler-Maclaurin tail of the remainder.
  double direct = 0.0;
  const int m = 200000;
  for (int n = m - 1; n >= 0; --n) direct += std::pow(n + 5.0, -3.0);
  const double a = m + 5.0;
  direct += 1.0 / (2.0 * a * a) + 1.0 / (2.0 * a * a * a) + 1.0 / (4.0 * a * a * a * a);
  CHECK(std::abs(hurwitz_zeta(3.0, 5.0) - direct) < 1e-13);

  CHECK_THROWS_AS(hurwitz_zeta(1.0, 2.0), DomainError);
  CHECK_THROWS_AS(hurwitz_zeta(2.0, 0.0), DomainError);
  CHECK(hurwitz_zeta_scaled(300.0, 3.0, 2.0) == doctest::Approx(std::pow(2.0 / 3.0, 300.0)).epsilon(1e-12));
}

TEST_CASE("hurwitz zeta derivatives") {
  CHECK(std::abs(hurwitz_zeta_deriv(0.0, 2) + 0.5 * std::log(kTwoPi)) < 1e-15);
  CHECK(std::abs(hurwitz_zeta_deriv(-1.0, 2) - zeta_prime_minus1()) < 1e-15);
  const double h = 1e-3;
  auto f = [](double s) { return hurwitz_zeta(s, 5.0); };
  const double fd = (f(-1.0 - 2 * h) - 8 * f(-1.0 - h) + 8 * f(-1.0 + h) - f(-1.0 + 2 * h)) / (12 * h);
  const double closed = zeta_prime_minus1() + 2 * std::log(2.0) + 3 * std::log(3.0) + 4 * std::log(4.0);
  CHECK(std::abs(hurwitz_zeta_deriv(-1.0, 5) - closed) < 1e-13);
  CHECK(std::abs(fd - closed) < 1e-10);
  CHECK(std::abs(hurwitz_zeta_ds(-1.0, 5.0) - closed) < 1e-11);
  CHECK(std::abs(hurwitz_zeta_ds(0.0, 7.0) - hurwitz_zeta_deriv(0.0, 7)) < 1e-11);
  CHECK_THROWS_AS(hurwitz_zeta_deriv(1.0, 3), DomainError);
}

TEST_CASE("zeta'(-1) from two routes") {
  const double zp = zeta_prime_minus1();
  CHECK(zp == doctest::Approx(-0.1654211437).epsilon(1e-9));
  CHECK(std::abs(zp - zeta_prime_minus1_glaisher()) < 1e-12);
  const double ln_glaisher = std::log(1.2824271291006226369);
  CHECK(std::abs(12.0 * (1.0 / 12.0 - zp - ln_glaisher)) < 1e-10);
}

TEST_CASE("log factorial, Barnes G and sum j ln j") {
  for (int n = 0; n <= 170; ++n) CHECK(std::abs(log_factorial(n) - std::lgamma(n + 1.0)) < 1e-10 * std::max(1.0, log_factorial(n)));
  CHECK(log_barnes_g(1) == 0.0);
  CHECK(std::abs(log_barnes_g(3) - std::log(2.0)) < 1e-15);
  for (int n = 1; n <= 100; ++n) CHECK(std::abs(log_barnes_g(n + 1) - log_barnes_g(n) - log_factorial(n)) < 1e-9);
  CHECK(std::abs(log_barnes_g(50) - log_barnes_g_asymptotic(50)) < 1e-2);
  const double r100 = std::abs(log_barnes_g(100) - log_barnes_g_asymptotic(100));
  const double r200 = std::abs(log_barnes_g(200) - log_barnes_g_asymptotic(200));
  CHECK(r100 < 1e-3);
  CHECK(r200 / r100 == doctest::Approx(0.25).epsilon(0.1));
  CHECK(std::isfinite(log_barnes_g_asymptotic(2)));
  CHECK_THROWS_AS(log_barnes_g(0), DomainError);

  CHECK(sum_j_ln_j(1) == 0.0);
  CHECK(std::abs(sum_j_ln_j(2) - 2.0 * std::log(2.0)) < 1e-15);
  CHECK(std::abs(sum_j_ln_j(500) - sum_j_ln_j_asymptotic(500)) < 1e-4);
}
