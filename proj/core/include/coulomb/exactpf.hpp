#pragma once

#include <optional>

#include "coulomb/geometry.hpp"

namespace coulomb::exactpf {

using geometry::GridPtr;
using geometry::PotentialSpec;
using geometry::SurfaceSpec;

struct LogDetResult {
  enum class Route { closed_form, gram_quadrature, hurwitz_series };

  double value = 0.0;
  Route route = Route::closed_form;
  double condition_estimate = 1.0;
};

double ln_z_sphere_exact(int n);

// Gram route with weight exp((N - 1) V). The computation is repeated on a
// grid of twice the resolution; a disagreement above 1e-6 raises
// ConditioningError.
LogDetResult ln_z_sphere_gram(int n, const PotentialSpec& v, const GridPtr& grid);
// Same Gram determinant on one grid, without the doubling check.
LogDetResult ln_z_sphere_gram_single(int n, const PotentialSpec& v, const GridPtr& grid);
// Diagonal Gram entry for V = 0, 2 pi / (N binom(N-1, l-1)).
double gram_diagonal_v0(int n, int l);

double ln_z_theta_torus_exact(int n, const specfun::TorusModulus& tau);

// ln Z from ln Z^theta: identity at g = 0, plus (1/2) ln det Im tau + (g/2) ln 2.
double partition_from_modified(double ln_z_theta, int g, const std::optional<specfun::PeriodMatrix>& tau);

enum class ScalarMetric { reference, arakelov };
// ln det Delta: round sphere (area 4 pi) or flat torus (area Im tau) for
// `reference`; Arakelov metric otherwise.
double det_scalar_laplacian(const SurfaceSpec& s, ScalarMetric metric);
// Canonical-metric value, obtained from the reference by the rescaling law.
double det_scalar_laplacian_canonical(const SurfaceSpec& s);
// (1 - chi/6) ln alpha: change of ln det Delta under rho -> alpha rho.
double det_rescaling_shift(int genus, double alpha);

double ln_det_magnetic_sphere(int k);
double ln_det_magnetic_sphere_asymptotic(int k);

struct ZetaKPrime {
  double closed_form = 0.0;
  double hurwitz_series = 0.0;
  // Terms used by the tail-bounded series.
  int series_terms = 0;
};
ZetaKPrime zeta_k_prime_zero(int k);
// zeta_k(0) = 2 zeta(-1, k+2) - (k+1) zeta(0, k+2), from Hurwitz values.
double zeta_k_zero(int k);
// Closed forms of the two Hurwitz series through the digamma function,
// returned as the assembled zeta_k'(0).
double zeta_k_prime_zero_digamma(int k);

double c_tilde(int n);
double c_tilde_asymptotic(int n);

}  // namespace coulomb::exactpf
