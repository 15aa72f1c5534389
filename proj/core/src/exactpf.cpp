#include "coulomb/exactpf.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace coulomb::exactpf {

namespace {

using specfun::log_barnes_g;
using specfun::log_factorial;
using specfun::sum_j_ln_j;
using specfun::zeta_prime_minus1;

const double kLn2 = std::numbers::ln2;
const double kLnPi = std::log(kPi);
const double kLn2Pi = std::log(kTwoPi);

double harmonic(int n) {
  KahanSum<double> acc;
  for (int j = 1; j <= n; ++j) acc += 1.0 / j;
  return acc.value();
}

}  // namespace

double ln_z_sphere_exact(int n) {
  if (n < 1) throw DomainError("ln_z_sphere_exact: N must be >= 1");
  const double N = n;
  return N * (N + 1.0) / 2.0 + N * kLnPi - N * log_factorial(n) + 2.0 * log_barnes_g(n);
}

double gram_diagonal_v0(int n, int l) {
  if (n < 1 || l < 1 || l > n) throw DomainError("gram_diagonal_v0: need 1 <= l <= N");
  const double log_binom = log_factorial(n - 1) - log_factorial(l - 1) - log_factorial(n - l);
  return kTwoPi / (n * std::exp(log_binom));
}

LogDetResult ln_z_sphere_gram_single(int n, const PotentialSpec& v, const GridPtr& grid) {
  if (n < 1) throw DomainError("ln_z_sphere_gram: N must be >= 1");
  if (grid->surface().is_torus()) throw DomainError("ln_z_sphere_gram: needs a sphere grid");
  if (grid->resolution() < 4 * n) throw DomainError("ln_z_sphere_gram: resolution must be >= 4N");
  geometry::require_admissible(v, grid);

  const auto nodes = grid->nodes();
  const auto mass = grid->mass();
  const size_t nq = nodes.size();
  const size_t un = static_cast<size_t>(n);
  const double k = n - 1.0;

  // Rows b_j(q) with M = B B^H, built in log magnitude and scaled per row.
  std::vector<double> base(nq), lnr(nq);
  for (size_t q = 0; q < nq; ++q) {
    const double r2 = std::norm(nodes[q]);
    const double u = r2 / (1.0 + r2);
    lnr[q] = 0.5 * std::log(r2);
    base[q] = 0.5 * std::log(kTwoPi * mass[q]) + 0.5 * k * std::log1p(-u) +
              0.5 * k * v.value(grid->surface(), nodes[q]);
  }
  // Column j of bt holds b_j over the nodes; M = bt^T conj(bt).
  Eigen::MatrixXcd bt(static_cast<Eigen::Index>(nq), static_cast<Eigen::Index>(un));
  double log_scale = 0.0;
  std::vector<double> row(nq);
  std::vector<cplx> unit(nq), phase(nq, cplx(1.0, 0.0));
  for (size_t q = 0; q < nq; ++q) unit[q] = nodes[q] / std::abs(nodes[q]);
  for (size_t j = 0; j < un; ++j) {
    double peak = -std::numeric_limits<double>::infinity();
    for (size_t q = 0; q < nq; ++q) {
      row[q] = base[q] + static_cast<double>(j) * lnr[q];
      peak = std::max(peak, row[q]);
    }
    log_scale += 2.0 * peak;
    cplx* col = bt.col(static_cast<Eigen::Index>(j)).data();
    for (size_t q = 0; q < nq; ++q) {
      col[q] = std::exp(row[q] - peak) * phase[q];
      phase[q] *= unit[q];
    }
  }
  Eigen::MatrixXcd M = bt.transpose() * bt.conjugate();
  Eigen::VectorXd d(M.rows());
  for (Eigen::Index j = 0; j < M.rows(); ++j) {
    d(j) = M(j, j).real();
    if (!(d(j) > 0.0)) throw ConditioningError("ln_z_sphere_gram: non-positive Gram diagonal");
    log_scale += std::log(d(j));
  }
  for (Eigen::Index j = 0; j < M.rows(); ++j)
    for (Eigen::Index l = 0; l < M.cols(); ++l) M(j, l) /= std::sqrt(d(j) * d(l));

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
  const auto& U = lu.matrixLU();
  double logdet = 0.0;
  for (Eigen::Index j = 0; j < U.rows(); ++j) logdet += std::log(std::abs(U(j, j)));
  const double rcond = lu.rcond();
  if (!std::isfinite(logdet) || !(rcond > 0.0)) throw ConditioningError("ln_z_sphere_gram: singular Gram matrix");

  const double N = n;
  LogDetResult out;
  out.route = LogDetResult::Route::gram_quadrature;
  out.value = N * (N + 1.0) / 2.0 - N * kLn2 + log_scale + logdet;
  out.condition_estimate = 1.0 / rcond;
  return out;
}

LogDetResult ln_z_sphere_gram(int n, const PotentialSpec& v, const GridPtr& grid) {
  const LogDetResult coarse = ln_z_sphere_gram_single(n, v, grid);
  const GridPtr fine = geometry::make_grid(grid->surface(), 2 * grid->resolution());
  const LogDetResult check = ln_z_sphere_gram_single(n, v, fine);
  if (std::abs(check.value - coarse.value) > 1e-6)
    throw ConditioningError("ln_z_sphere_gram: resolution doubling changes the result by " +
                            std::to_string(std::abs(check.value - coarse.value)));
  return coarse;
}

double ln_z_theta_torus_exact(int n, const specfun::TorusModulus& tau) {
  if (n < 1) throw DomainError("ln_z_theta_torus_exact: N must be >= 1");
  const double eta2 = std::norm(specfun::dedekind_eta(tau));
  const double N = n;
  return -0.5 * N * std::log(N) + N * std::log(2.0 * kPi * kPi * std::sqrt(2.0 * tau.im()) * eta2) +
         std::log(eta2);
}

double partition_from_modified(double ln_z_theta, int g, const std::optional<specfun::PeriodMatrix>& tau) {
  if (g < 0) throw DomainError("partition_from_modified: negative genus");
  if (g == 0) return ln_z_theta;
  if (!tau) throw DomainError("partition_from_modified: period matrix required for g >= 1");
  if (tau->genus() != g) throw DomainError("partition_from_modified: period matrix has the wrong genus");
  return ln_z_theta + 0.5 * std::log(tau->im_det()) + 0.5 * g * kLn2;
}

double det_rescaling_shift(int genus, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("det_rescaling_shift: alpha must be positive");
  const double chi = 2.0 * (1.0 - genus);
  return (1.0 - chi / 6.0) * std::log(alpha);
}

double det_scalar_laplacian(const SurfaceSpec& s, ScalarMetric metric) {
  const double zp = zeta_prime_minus1();
  if (!s.is_torus()) {
    if (metric == ScalarMetric::reference) return 0.5 - 4.0 * zp;
    return 7.0 / 6.0 - 4.0 / 3.0 * kLn2 - 4.0 * zp;
  }
  const double t = s.im_tau();
  const double eta2 = std::norm(s.eta());
  if (metric == ScalarMetric::reference) return std::log(t * t * eta2 * eta2);
  return std::log(4.0 * kPi * kPi * t * t * eta2 * eta2 * eta2 * eta2);
}

double det_scalar_laplacian_canonical(const SurfaceSpec& s) {
  const double ref_volume = s.is_torus() ? s.im_tau() : 4.0 * kPi;
  return det_scalar_laplacian(s, ScalarMetric::reference) + det_rescaling_shift(s.genus(), 1.0 / ref_volume);
}

double ln_det_magnetic_sphere(int k) {
  if (k < 0) throw DomainError("ln_det_magnetic_sphere: k must be >= 0");
  const double K = k + 1.0;
  const double c = 1.0 - 2.0 * kLn2;
  return K * log_factorial(k + 1) - 2.0 * sum_j_ln_j(k + 1) - 4.0 * zeta_prime_minus1() + K * K / 2.0 +
         c * K / 2.0 + c / 6.0;
}

double ln_det_magnetic_sphere_asymptotic(int k) {
  if (k < 1) throw DomainError("ln_det_magnetic_sphere_asymptotic: k must be >= 1");
  const double K = k;
  const double lk = std::log(K);
  // Large-k expansion of the closed form above.
  return -0.5 * K * lk + 0.5 * (1.0 + kLn2Pi - 2.0 * kLn2) * K - 2.0 / 3.0 * lk + 1.0 / 12.0 -
         2.0 * zeta_prime_minus1() + 0.5 * kLn2Pi - 4.0 / 3.0 * kLn2;
}

ZetaKPrime zeta_k_prime_zero(int k) {
  if (k < 0) throw DomainError("zeta_k_prime_zero: k must be >= 0");
  const double K = k + 1.0;
  ZetaKPrime out;
  out.closed_form = 4.0 * zeta_prime_minus1() + 2.0 * sum_j_ln_j(k + 1) - K * log_factorial(k + 1) - K * K / 2.0;

  // sum_{m >= 2} (m - 1) / (m (m + 1)) (k+1)^m zeta(m, k+2); the terms decay
  // like ((k+1)/(k+2))^m / m^2.
  KahanSum<double> tail;
  double prev = std::numeric_limits<double>::infinity();
  int m = 2;
  for (;; ++m) {
    const double term = (m - 1.0) / (m * (m + 1.0)) * specfun::hurwitz_zeta_scaled(m, k + 2.0, K);
    tail += term;
    if (m > 3 && term > prev) throw ConditioningError("zeta_k_prime_zero: series fails the ratio guard");
    prev = term;
    if (term < 1e-17 * std::abs(tail.value())) break;
    if (m > 200000) throw ConditioningError("zeta_k_prime_zero: series did not converge");
  }
  out.series_terms = m - 1;
  out.hurwitz_series = 4.0 * specfun::hurwitz_zeta_deriv(-1.0, k + 2) - 2.0 * K * specfun::hurwitz_zeta_deriv(0.0, k + 2) +
                       2.0 * K * specfun::hurwitz_zeta(0.0, k + 2.0) + K * K / 2.0 + K * tail.value();
  return out;
}

double zeta_k_zero(int k) {
  if (k < 0) throw DomainError("zeta_k_zero: k must be >= 0");
  const double a = k + 2.0;
  return 2.0 * specfun::hurwitz_zeta(-1.0, a) - (k + 1.0) * specfun::hurwitz_zeta(0.0, a);
}

double zeta_k_prime_zero_digamma(int k) {
  if (k < 0) throw DomainError("zeta_k_prime_zero_digamma: k must be >= 0");
  const double K = k + 1.0;
  const double psi = -std::numbers::egamma + harmonic(k + 1);
  const double lf = log_factorial(k + 1);
  // (k+1) sum zeta(n, k+2) (k+1)^n / n
  const double first = -K * lf + K * K * psi;
  // 2 sum zeta(n, k+2) (k+1)^(n+1) / (n (n+1))
  const double second = 2.0 * specfun::hurwitz_zeta_deriv(-1.0, k + 2) - 2.0 * zeta_prime_minus1() +
                        2.0 * K * (0.5 - k - 2.0 - lf + 0.5 * kLn2Pi) + (1.0 + psi) * K * K;
  return 4.0 * specfun::hurwitz_zeta_deriv(-1.0, k + 2) - 2.0 * K * specfun::hurwitz_zeta_deriv(0.0, k + 2) +
         2.0 * K * (-0.5 - K) + K * K / 2.0 + first - second;
}

double c_tilde(int n) {
  if (n < 1) throw DomainError("c_tilde: n must be >= 1");
  const double N = n;
  KahanSum<double> acc;
  for (int j = 0; j < n; ++j) {
    const double J = j;
    acc += 0.5 * (2.0 * N - 2.0 * J - 1.0) * std::log(2.0 * N * J + 2.0 * N - J * J - J);
  }
  acc += -(N + 0.5) * (N + 0.5) + (N + 0.5) * kLn2Pi + 2.0 * zeta_prime_minus1();
  acc += -2.0 * log_barnes_g(n) - log_factorial(n);
  return acc.value();
}

double c_tilde_asymptotic(int n) {
  if (n < 1) throw DomainError("c_tilde_asymptotic: n must be >= 1");
  const double N = n;
  const double ln = std::log(N);
  return -0.5 * N * ln + 0.5 * kLnPi * N - ln / 6.0 - 5.0 / 24.0 + zeta_prime_minus1() + 0.25 * kLnPi + kLn2 / 12.0;
}

}  // namespace coulomb::exactpf
