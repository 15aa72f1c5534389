#pragma once

#include <optional>
#include <utility>

#include "coulomb/functionals.hpp"
#include "coulomb/specfun.hpp"

namespace coulomb::expansion {

using geometry::GridPtr;
using geometry::PotentialSpec;
using geometry::SurfaceSpec;

// quad n^2 + nlogn n ln n + linear n + logn ln n + constant.
struct ExpansionCoefficients {
  enum class Variable { in_k, in_n };
  enum class Kind { modified, plain };

  double quad = 0.0;
  double nlogn = -0.5;
  double linear = 0.0;
  double logn = 0.0;
  double constant = 0.0;
  Variable variable = Variable::in_k;
  Kind kind = Kind::modified;
};

double eval_expansion(const ExpansionCoefficients& c, double n);

struct BosonizationConstants {
  int g = 0;
  int k = 0;
  double ln_b = 0.0;
  double c_g = 0.0;
};

double c0_constant();
double c1_constant();
BosonizationConstants ln_b_gk(int g, int k);

double faltings_delta(const SurfaceSpec& s);
// c_g - 6 ln(det Delta_Ar / vol_Ar) from the module pieces.
double faltings_delta_assembled(const SurfaceSpec& s);

// Arakelov-metric functional values entering the constant terms. For g <= 1
// they are computed on a grid; for g >= 2 the caller supplies them.
struct ArakelovInputs {
  double s_mabuchi = 0.0;        // S_M(-sigma_Ar, -phi_Ar, rho_Ar)
  double s_liouville = 0.0;      // S_L(-sigma_Ar, rho_Ar)
  double s_aubin_yau_hat = 0.0;  // S_AY(phi_hat_Ar, rho_can)
  double polyakov = 0.0;         // Psi_P(rho_Ar)
  double ln_det_ratio = 0.0;     // ln(det Delta_Ar / (vol_Ar det Im tau))
};

// V-dependent integrals, all against mu_can.
struct PotentialInputs {
  double quad = 0.0;      // -S_2(-V, rho_Ar, h)
  double linear = 0.0;    // -(1/2) int mu_V ln f_V + (1 - g) int V
  double constant = 0.0;  // ln f_V terms of the constant coefficient
};

ArakelovInputs arakelov_inputs(const GridPtr& grid);
PotentialInputs potential_inputs(const PotentialSpec& v, const GridPtr& grid);

// Symbolic assembly in k for any genus.
ExpansionCoefficients assemble_modified(int g, const ArakelovInputs& ar, const PotentialInputs& pot);
// In-k modified to in-N plain (k = N + g - 1), plus the theta-average shift.
ExpansionCoefficients to_plain(const ExpansionCoefficients& modified, int g, double ln_det_im_tau);
// In-k modified to in-N modified, without the theta-average shift.
ExpansionCoefficients to_n(const ExpansionCoefficients& modified, int g);

ExpansionCoefficients coeffs_modified(const SurfaceSpec& s, const PotentialSpec& v, const GridPtr& grid);
ExpansionCoefficients coeffs_plain(const SurfaceSpec& s, const PotentialSpec& v, const GridPtr& grid);

// Midpoint quadrature of the theta norm over the unit cube in (P, Q).
std::pair<double, double> theta_integral_check(const specfun::PeriodMatrix& tau, int resolution);

}  // namespace coulomb::expansion
