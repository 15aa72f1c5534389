#pragma once

#include <vector>

#include "coulomb/geometry.hpp"

namespace coulomb::functionals {

using geometry::GridPtr;
using geometry::PotentialSpec;
using geometry::ScalarField;

// Conformal metric rho = exp(2 s) rho_can sampled on a grid. Every integral
// below is reduced to canonical quantities through
//   mu_rho Delta_rho = mu_can Delta_can,  mu_rho R_rho = mu_can (R_can + 2 Delta_can s).
struct Metric {
  enum class Kind { canonical, arakelov, general };

  GridPtr grid;
  std::vector<double> s;
  Kind kind = Kind::general;

  static Metric canonical(const GridPtr& grid);
  static Metric arakelov(const GridPtr& grid);
  // exp(2 sigma) rho.
  Metric conformal(const ScalarField& sigma) const;

  int genus() const { return grid->surface().genus(); }
  double volume() const;
  // mu_rho weights per node.
  std::vector<double> mass() const;
  // R_rho at every node.
  std::vector<double> curvature() const;
};

// rho = exp(2 sigma) rho_0 together with its Kahler potential phi relative to rho_0.
struct ConformalPair {
  ScalarField sigma;
  ScalarField phi;
  Metric::Kind reference = Metric::Kind::canonical;
};

// Mean-zero phi with Delta_0 phi = (2 / vol) (vol / vol_0 - exp(2 sigma)).
ScalarField kahler_potential(const ScalarField& sigma, const Metric& ref);
ConformalPair make_pair(const ScalarField& sigma, const Metric& ref);

double s_liouville(const ScalarField& sigma, const Metric& ref);
double s_mabuchi(const ScalarField& sigma, const ScalarField& phi, const Metric& ref);
double s_aubin_yau(const ScalarField& phi, const Metric& ref);
// b0 is the normalized magnetic field B / k at every node.
double s1(const ScalarField& sigma, const ScalarField& psi, const Metric& ref, const ScalarField& b0);
double s2(const ScalarField& psi, const Metric& ref, const ScalarField& b0);

// B / k for an admissible hermitian metric: 2 pi rho_can / rho.
ScalarField admissible_field(const Metric& ref);
// B / k after the change h -> exp(-k psi) h: b0 - (1/2) Delta_0 psi.
ScalarField changed_field(const ScalarField& b0, const ScalarField& psi, const Metric& ref);

// Ricci potential: Delta_rho Psi = R - mean(R), integral of mu_rho Psi = 0.
ScalarField ricci_potential(const Metric& m);
// (1/4) integral of mu_rho R Psi.
double polyakov(const Metric& m);

// F(rho, h) in the normalized form with b = B / (2 pi k), split into
// F = k_ln_k * k ln k + k_coeff * k + ln_k * ln k + constant.
struct CurlyF {
  double k_ln_k = 0.0;
  double k_coeff = 0.0;
  double ln_k = 0.0;
  double constant = 0.0;

  double at(double k) const;
};
CurlyF f_curly(const Metric& m, const ScalarField& b);

struct EquilibriumData {
  ScalarField f_v;
  std::vector<double> mu_v_weights;
  double c_v = 0.0;
};

// f_V = 1 + Delta_can V / 4 pi, mu_V = f_V mu_can, c_V = (1/2) integral of mu_can V.
EquilibriumData equilibrium(const PotentialSpec& v, const GridPtr& grid);
// Integral of mu_V G_can(., y) + V(y) / 2, which equals c_V for every y.
double equilibrium_identity(const EquilibriumData& eq, const PotentialSpec& v, cplx y);

}  // namespace coulomb::functionals
