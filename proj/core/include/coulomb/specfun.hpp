#pragma once

#include <span>
#include <vector>

#include "coulomb/common.hpp"

namespace coulomb::specfun {

// Modulus of a genus-one surface, Im(tau) > 0.
class TorusModulus {
 public:
  explicit TorusModulus(cplx tau);
  cplx tau() const { return tau_; }
  double im() const { return tau_.imag(); }

 private:
  cplx tau_;
};

// Rational characteristic [a; b] kept as exact fractions.
struct ThetaCharacteristic {
  long a_num = 0, a_den = 1;
  long b_num = 0, b_den = 1;

  double a() const { return static_cast<double>(a_num) / static_cast<double>(a_den); }
  double b() const { return static_cast<double>(b_num) / static_cast<double>(b_den); }
};

// Symmetric g x g period matrix with positive definite imaginary part.
class PeriodMatrix {
 public:
  PeriodMatrix(int g, std::vector<cplx> entries);  // row-major
  static PeriodMatrix genus1(cplx tau);
  static PeriodMatrix diagonal(std::span<const cplx> diag);

  int genus() const { return g_; }
  cplx operator()(int i, int j) const { return tau_[static_cast<size_t>(i * g_ + j)]; }
  double im_det() const { return im_det_; }
  double im_lambda_min() const { return lambda_min_; }
  // Entry (i, j) of Im(tau)^{-1}.
  double im_inv(int i, int j) const { return im_inv_[static_cast<size_t>(i * g_ + j)]; }

 private:
  int g_;
  std::vector<cplx> tau_;
  std::vector<double> im_inv_;
  double im_det_ = 0.0;
  double lambda_min_ = 0.0;
};

cplx jacobi_theta1(cplx z, const TorusModulus& tau);
cplx dedekind_eta(const TorusModulus& tau);

// Lattice box radius used for all theta sums.
int theta_box_radius(double lambda_min);

cplx riemann_theta(std::span<const cplx> z, const PeriodMatrix& tau);
double theta_norm_sq(std::span<const cplx> z, const PeriodMatrix& tau);
cplx theta_with_char(const ThetaCharacteristic& ch, cplx z, const TorusModulus& tau);

double hurwitz_zeta(double s, double a);
// c^s * zeta(s, a), evaluated without under/overflow for large s.
double hurwitz_zeta_scaled(double s, double a, double c);
// d/ds zeta(s, a) by term-wise differentiated Euler-Maclaurin.
double hurwitz_zeta_ds(double s, double a);
// Closed forms at s in {-1, 0} for integer a >= 2.
double hurwitz_zeta_deriv(double s, int a);

double zeta_prime_minus1();
// 1/12 - ln A with ln A from zeta'(2) and Euler's gamma.
double zeta_prime_minus1_glaisher();

double log_factorial(int n);
double log_barnes_g(int n);  // ln G(n+1)
double log_barnes_g_asymptotic(int n);
double sum_j_ln_j(int n);
double sum_j_ln_j_asymptotic(int n);

}  // namespace coulomb::specfun
