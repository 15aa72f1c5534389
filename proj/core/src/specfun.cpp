#include "coulomb/specfun.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace coulomb::specfun {

namespace {

constexpr cplx kI{0.0, 1.0};

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void require_finite(cplx z, const char* what) {
  if (!finite(z)) throw DomainError(std::string(what) + ": non-finite argument");
}

// B_{2j} / (2j)! for j = 1..8.
constexpr std::array<double, 8> kBernoulliOverFactorial = {
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0,
    -3617.0 / 510.0 / 20922789888000.0,
};

constexpr double kEmThreshold = 20.0;

// Euler-Maclaurin for c^s zeta(s, a) (value) or d/ds zeta(s, a) (derivative,
// c = 1 only). Terms are summed directly until either they are negligible or
// n + a passes the shift threshold, then the tail is closed analytically.
double euler_maclaurin(double s, double a, double log_c, bool derivative) {
  const double threshold = std::max(kEmThreshold, 2.0 * std::abs(s));
  KahanSum<double> acc;
  double n = 0.0;
  double first = 0.0;
  for (;; n += 1.0) {
    const double x = n + a;
    if (x >= threshold) break;
    const double lx = std::log(x);
    const double mag = std::exp(-s * (lx - log_c));
    const double term = derivative ? -lx * mag : mag;
    if (n == 0.0) first = std::abs(term);
    acc += term;
    // Rapidly decaying series (large s): stop once the remaining tail,
    // bounded by x * term / (s - 1), is negligible.
    if (s > 2.0 && n > 0.0 && x * std::abs(term) / (s - 1.0) < 1e-18 * std::max(first, 1e-300))
      return acc.value();
  }
  const double X = n + a;
  const double lX = std::log(X);
  const double base = std::exp(-s * (lX - log_c));  // c^s X^-s
  if (!derivative) {
    acc += base * X / (s - 1.0);
    acc += 0.5 * base;
    double poch = s;  // s (s+1) ... (s + 2j - 2)
    double xpow = base / X;
    for (size_t j = 0; j < kBernoulliOverFactorial.size(); ++j) {
      acc += kBernoulliOverFactorial[j] * poch * xpow;
      poch *= (s + 2.0 * j + 1.0) * (s + 2.0 * j + 2.0);
      xpow /= X * X;
    }
    return acc.value();
  }
  // Derivative of each closed-form tail piece with respect to s.
  acc += -base * X * (lX / (s - 1.0) + 1.0 / ((s - 1.0) * (s - 1.0)));
  acc += -0.5 * lX * base;
  double xpow = base / X;
  for (size_t j = 0; j < kBernoulliOverFactorial.size(); ++j) {
    const int len = static_cast<int>(2 * j + 1);
    double poch = 1.0;
    double dpoch = 0.0;
    for (int i = 0; i < len; ++i) {
      dpoch = dpoch * (s + i) + poch;
      poch *= (s + i);
    }
    acc += kBernoulliOverFactorial[j] * (dpoch - poch * lX) * xpow;
    xpow /= X * X;
  }
  return acc.value();
}

// Generic lattice sum over a box of half-width R centred at `centre`,
// summing exp(expo(n)).
template <class F>
cplx lattice_box_sum(int g, const std::array<long, 3>& centre, int R, F&& expo) {
  KahanSum<cplx> acc;
  std::array<long, 3> n{};
  std::array<long, 3> off{};
  for (int i = 0; i < g; ++i) off[static_cast<size_t>(i)] = -R;
  for (;;) {
    for (int i = 0; i < g; ++i)
      n[static_cast<size_t>(i)] = centre[static_cast<size_t>(i)] + off[static_cast<size_t>(i)];
    acc += std::exp(expo(n));
    int d = 0;
    while (d < g) {
      auto& o = off[static_cast<size_t>(d)];
      if (++o <= R) break;
      o = -R;
      ++d;
    }
    if (d == g) break;
  }
  return acc.value();
}

}  // namespace

TorusModulus::TorusModulus(cplx tau) : tau_(tau) {
  require_finite(tau, "TorusModulus");
  if (!(tau.imag() > 0.0)) throw DomainError("TorusModulus: Im(tau) must be positive");
}

PeriodMatrix::PeriodMatrix(int g, std::vector<cplx> entries) : g_(g), tau_(std::move(entries)) {
  if (g < 1 || g > 3) throw DomainError("PeriodMatrix: supported genus is 1..3");
  if (tau_.size() != static_cast<size_t>(g * g)) throw DomainError("PeriodMatrix: wrong entry count");
  Eigen::MatrixXd Y(g, g);
  double scale = 0.0;
  for (const auto& t : tau_) {
    require_finite(t, "PeriodMatrix");
    scale = std::max(scale, std::abs(t));
  }
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      if (std::abs((*this)(i, j) - (*this)(j, i)) > 1e-12 * std::max(scale, 1.0))
        throw DomainError("PeriodMatrix: tau must be symmetric");
      Y(i, j) = (*this)(i, j).imag();
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Y);
  lambda_min_ = es.eigenvalues().minCoeff();
  if (!(lambda_min_ > 0.0)) throw DomainError("PeriodMatrix: Im(tau) must be positive definite");
  im_det_ = es.eigenvalues().prod();
  Eigen::MatrixXd inv = Y.inverse();
  im_inv_.resize(static_cast<size_t>(g * g));
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) im_inv_[static_cast<size_t>(i * g + j)] = inv(i, j);
}

PeriodMatrix PeriodMatrix::genus1(cplx tau) { return PeriodMatrix(1, {tau}); }

PeriodMatrix PeriodMatrix::diagonal(std::span<const cplx> diag) {
  const int g = static_cast<int>(diag.size());
  std::vector<cplx> e(static_cast<size_t>(g * g), cplx{0.0, 0.0});
  for (int i = 0; i < g; ++i) e[static_cast<size_t>(i * g + i)] = diag[static_cast<size_t>(i)];
  return PeriodMatrix(g, std::move(e));
}

cplx jacobi_theta1(cplx z, const TorusModulus& tau) {
  require_finite(z, "jacobi_theta1");
  const cplx t = tau.tau();
  const double y = z.imag();
  auto term = [&](long n) {
    const double h = static_cast<double>(n) + 0.5;
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return sign * std::exp(kI * kPi * (t * h * h + 2.0 * h * z));
  };
  // Terms peak where n + 1/2 is closest to -Im z / Im tau.
  const long n0 = std::lround(-y / tau.im() - 0.5);
  KahanSum<cplx> acc;
  double peak = 0.0;
  for (long n = n0;; ++n) {
    const cplx v = term(n);
    peak = std::max(peak, std::abs(v));
    acc += v;
    if (n > n0 && std::abs(v) < 1e-16 * peak) break;
  }
  for (long n = n0 - 1;; --n) {
    const cplx v = term(n);
    peak = std::max(peak, std::abs(v));
    acc += v;
    if (std::abs(v) < 1e-16 * peak) break;
  }
  return -kI * acc.value();
}

cplx dedekind_eta(const TorusModulus& tau) {
  const cplx t = tau.tau();
  const cplx q = std::exp(2.0 * kI * kPi * t);
  cplx prod{1.0, 0.0};
  cplx qn = q;
  while (std::abs(qn) >= 1e-18) {
    prod *= (1.0 - qn);
    qn *= q;
  }
  return std::exp(kI * kPi * t / 12.0) * prod;
}

int theta_box_radius(double lambda_min) {
  if (!(lambda_min > 0.0)) throw DomainError("theta_box_radius: lambda_min must be positive");
  return static_cast<int>(std::ceil(std::sqrt(16.0 * std::log(10.0) / (kPi * lambda_min)))) + 2;
}

namespace {

// Shared evaluation: returns sum_n exp(i pi n^T tau n + 2 i pi n^T z - shift)
// with shift = pi y^T Y^{-1} y, so that the magnitude of every term is at
// most one.
cplx scaled_theta(std::span<const cplx> z, const PeriodMatrix& tau, double* shift_out) {
  const int g = tau.genus();
  if (static_cast<int>(z.size()) != g) throw DomainError("riemann_theta: z has wrong length");
  for (const auto& zi : z) require_finite(zi, "riemann_theta");
  std::array<double, 3> c{};  // Y^{-1} y
  double shift = 0.0;
  for (int i = 0; i < g; ++i) {
    double ci = 0.0;
    for (int j = 0; j < g; ++j) ci += tau.im_inv(i, j) * z[static_cast<size_t>(j)].imag();
    c[static_cast<size_t>(i)] = ci;
    shift += kPi * z[static_cast<size_t>(i)].imag() * ci;
  }
  std::array<long, 3> centre{};
  for (int i = 0; i < g; ++i) centre[static_cast<size_t>(i)] = std::lround(-c[static_cast<size_t>(i)]);
  const int R = theta_box_radius(tau.im_lambda_min());
  *shift_out = shift;
  return lattice_box_sum(g, centre, R, [&](const std::array<long, 3>& n) {
    cplx e{-shift, 0.0};
    for (int i = 0; i < g; ++i) {
      const double ni = static_cast<double>(n[static_cast<size_t>(i)]);
      e += 2.0 * kI * kPi * ni * z[static_cast<size_t>(i)];
      for (int j = 0; j < g; ++j)
        e += kI * kPi * ni * static_cast<double>(n[static_cast<size_t>(j)]) * tau(i, j);
    }
    return e;
  });
}

}  // namespace

cplx riemann_theta(std::span<const cplx> z, const PeriodMatrix& tau) {
  double shift = 0.0;
  const cplx s = scaled_theta(z, tau, &shift);
  return s * std::exp(shift);
}

double theta_norm_sq(std::span<const cplx> z, const PeriodMatrix& tau) {
  double shift = 0.0;
  const cplx s = scaled_theta(z, tau, &shift);
  // |theta|^2 exp(-2 pi y^T Y^-1 y) = |s|^2 exactly with this shift.
  return std::norm(s);
}

cplx theta_with_char(const ThetaCharacteristic& ch, cplx z, const TorusModulus& tau) {
  require_finite(z, "theta_with_char");
  if (ch.a_den == 0 || ch.b_den == 0) throw DomainError("theta_with_char: zero denominator");
  const double a = ch.a();
  const double b = ch.b();
  const cplx t = tau.tau();
  const long centre = std::lround(-a - z.imag() / tau.im());
  const int R = theta_box_radius(tau.im());
  return lattice_box_sum(1, {centre, 0, 0}, R, [&](const std::array<long, 3>& n) {
    const double m = static_cast<double>(n[0]) + a;
    return kI * kPi * (m * m * t + 2.0 * m * (z + b));
  });
}

double hurwitz_zeta(double s, double a) {
  if (!std::isfinite(s) || !std::isfinite(a)) throw DomainError("hurwitz_zeta: non-finite argument");
  if (!(a > 0.0)) throw DomainError("hurwitz_zeta: a must be positive");
  if (s == 1.0) throw DomainError("hurwitz_zeta: pole at s = 1");
  return euler_maclaurin(s, a, 0.0, false);
}

double hurwitz_zeta_scaled(double s, double a, double c) {
  if (!(a > 0.0) || !(c > 0.0)) throw DomainError("hurwitz_zeta_scaled: a and c must be positive");
  if (s == 1.0) throw DomainError("hurwitz_zeta_scaled: pole at s = 1");
  return euler_maclaurin(s, a, std::log(c), false);
}

double hurwitz_zeta_ds(double s, double a) {
  if (!(a > 0.0)) throw DomainError("hurwitz_zeta_ds: a must be positive");
  if (s == 1.0) throw DomainError("hurwitz_zeta_ds: pole at s = 1");
  return euler_maclaurin(s, a, 0.0, true);
}

double hurwitz_zeta_deriv(double s, int a) {
  if (a < 2) throw DomainError("hurwitz_zeta_deriv: a must be an integer >= 2");
  if (s == -1.0) return zeta_prime_minus1() + sum_j_ln_j(a - 1);
  if (s == 0.0) return -0.5 * std::log(kTwoPi) + log_factorial(a - 1);
  throw DomainError("hurwitz_zeta_deriv: only s = -1 and s = 0 are supported");
}

double zeta_prime_minus1() {
  static const double value = hurwitz_zeta_ds(-1.0, 1.0);
  return value;
}

double zeta_prime_minus1_glaisher() {
  const double zeta_prime_2 = hurwitz_zeta_ds(2.0, 1.0);
  const double log_glaisher =
      (std::numbers::egamma + std::log(kTwoPi)) / 12.0 - zeta_prime_2 / (2.0 * kPi * kPi);
  return 1.0 / 12.0 - log_glaisher;
}

double log_factorial(int n) {
  if (n < 0) throw DomainError("log_factorial: n must be non-negative");
  KahanSum<double> acc;
  for (int j = 2; j <= n; ++j) acc += std::log(static_cast<double>(j));
  return acc.value();
}

double log_barnes_g(int n) {
  if (n < 1) throw DomainError("log_barnes_g: n must be >= 1");
  KahanSum<double> lf;   // ln j!
  KahanSum<double> acc;  // sum of ln j!
  for (int j = 1; j <= n - 1; ++j) {
    lf += std::log(static_cast<double>(j));
    acc += lf.value();
  }
  return acc.value();
}

double log_barnes_g_asymptotic(int n) {
  if (n < 2) throw DomainError("log_barnes_g_asymptotic: n must be >= 2");
  const double N = n;
  const double lN = std::log(N);
  return 0.5 * N * N * lN - 0.75 * N * N + 0.5 * N * std::log(kTwoPi) - lN / 12.0 + zeta_prime_minus1();
}

double sum_j_ln_j(int n) {
  if (n < 1) throw DomainError("sum_j_ln_j: n must be >= 1");
  KahanSum<double> acc;
  for (int j = 2; j <= n; ++j) acc += j * std::log(static_cast<double>(j));
  return acc.value();
}

double sum_j_ln_j_asymptotic(int n) {
  if (n < 1) throw DomainError("sum_j_ln_j_asymptotic: n must be >= 1");
  const double N = n;
  return (0.5 * N * N + 0.5 * N + 1.0 / 12.0) * std::log(N) - 0.25 * N * N + 1.0 / 12.0 -
         zeta_prime_minus1();
}

}  // namespace coulomb::specfun
