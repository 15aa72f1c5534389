#include "coulomb/expansion.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "coulomb/exactpf.hpp"

namespace coulomb::expansion {

namespace {

using functionals::Metric;
using geometry::ScalarField;

const double kLn2 = std::numbers::ln2;
const double kLn2Pi = std::log(kTwoPi);

void require_numeric_genus(const SurfaceSpec& s) {
  if (s.genus() > 1) throw DomainError("numeric evaluation supports genus 0 and 1 only");
}

double ln_det_im_tau(const SurfaceSpec& s) { return s.is_torus() ? std::log(s.im_tau()) : 0.0; }

}  // namespace

double eval_expansion(const ExpansionCoefficients& c, double n) {
  if (!(n > 0.0)) throw DomainError("eval_expansion: n must be positive");
  const double ln = std::log(n);
  return c.quad * n * n + c.nlogn * n * ln + c.linear * n + c.logn * ln + c.constant;
}

double c0_constant() { return -24.0 * specfun::zeta_prime_minus1() + 1.0 - 6.0 * kLn2Pi - 2.0 * kLn2; }

double c1_constant() { return -8.0 * kLn2Pi; }

BosonizationConstants ln_b_gk(int g, int k) {
  if (g < 0) throw DomainError("ln_b_gk: negative genus");
  if (k < g) throw DomainError("ln_b_gk: bosonization needs k >= g");
  BosonizationConstants b;
  b.g = g;
  b.k = k;
  b.c_g = (1.0 - g) * c0_constant() + g * c1_constant();
  b.ln_b = -k * kLn2Pi + (1.0 - g) / 4.0 * c0_constant();
  return b;
}

double faltings_delta(const SurfaceSpec& s) {
  require_numeric_genus(s);
  if (!s.is_torus()) return 0.0;
  const double eta2 = std::norm(s.eta());
  return -6.0 * std::log(s.im_tau() * eta2 * eta2) - 8.0 * kLn2Pi;
}

double faltings_delta_assembled(const SurfaceSpec& s) {
  require_numeric_genus(s);
  const double cg = ln_b_gk(s.genus(), s.genus()).c_g;
  return cg - 6.0 * (exactpf::det_scalar_laplacian(s, exactpf::ScalarMetric::arakelov) -
                     std::log(geometry::volume_arakelov(s)));
}

ArakelovInputs arakelov_inputs(const GridPtr& grid) {
  const SurfaceSpec& s = grid->surface();
  require_numeric_genus(s);
  const Metric ar = Metric::arakelov(grid);
  const Metric can = Metric::canonical(grid);
  const ScalarField sigma = ScalarField::constant(grid, -geometry::sigma_arakelov(s));
  const ScalarField phi = functionals::kahler_potential(sigma, ar);
  ArakelovInputs in;
  in.s_mabuchi = functionals::s_mabuchi(sigma, phi, ar);
  in.s_liouville = functionals::s_liouville(sigma, ar);
  // phi_hat_Ar vanishes when sigma_Ar is constant.
  in.s_aubin_yau_hat = functionals::s_aubin_yau(ScalarField::constant(grid, 0.0), can);
  in.polyakov = functionals::polyakov(ar);
  in.ln_det_ratio = exactpf::det_scalar_laplacian(s, exactpf::ScalarMetric::arakelov) -
                    std::log(geometry::volume_arakelov(s)) - ln_det_im_tau(s);
  return in;
}

PotentialInputs potential_inputs(const PotentialSpec& v, const GridPtr& grid) {
  const SurfaceSpec& s = grid->surface();
  require_numeric_genus(s);
  PotentialInputs in;
  if (v.family() == PotentialSpec::Family::zero) return in;
  const double chi_term = 1.0 - s.genus();
  const functionals::EquilibriumData eq = functionals::equilibrium(v, grid);
  const ScalarField vf = geometry::sample(v, grid);

  const Metric ar = Metric::arakelov(grid);
  std::vector<double> minus_v(vf.values);
  for (auto& x : minus_v) x = -x;
  in.quad = -functionals::s2(ScalarField(grid, minus_v), ar, functionals::admissible_field(ar));

  const size_t n = vf.size();
  std::vector<double> lnf(n), flnf(n), curv(n);
  const double r0 = geometry::curvature_canonical(s);
  for (size_t k = 0; k < n; ++k) {
    lnf[k] = std::log(eq.f_v[k]);
    flnf[k] = eq.f_v[k] * lnf[k];
    curv[k] = (r0 - 8.0 * kPi * chi_term) * lnf[k];
  }
  in.linear = -0.5 * geometry::integrate(*grid, flnf) + chi_term * geometry::integrate(vf);

  const std::vector<double> lap = geometry::apply_laplacian(*grid, lnf);
  std::vector<double> dir(n);
  for (size_t k = 0; k < n; ++k) dir[k] = lnf[k] * lap[k];
  in.constant = -2.0 / 3.0 * chi_term * geometry::integrate(*grid, lnf) +
                geometry::integrate(*grid, curv) / (24.0 * kPi) + geometry::integrate(*grid, dir) / (48.0 * kPi);
  return in;
}

ExpansionCoefficients assemble_modified(int g, const ArakelovInputs& ar, const PotentialInputs& pot) {
  const double chi_term = 1.0 - g;
  const double zp = specfun::zeta_prime_minus1();
  ExpansionCoefficients c;
  c.variable = ExpansionCoefficients::Variable::in_k;
  c.kind = ExpansionCoefficients::Kind::modified;
  c.quad = pot.quad;
  c.nlogn = -0.5;
  c.logn = 2.0 * (g - 1.0) / 3.0;
  c.linear = kTwoPi * chi_term * ar.s_aubin_yau_hat - 0.25 * ar.s_mabuchi + kLn2Pi - 0.5 * kLn2 + pot.linear;
  c.constant = chi_term * (4.0 * zp + 4.0 / 3.0 * kLn2Pi - 5.0 / 6.0 - kLn2 / 6.0) +
               (ar.polyakov - ar.s_liouville) / (6.0 * kPi) - ar.polyakov / (12.0 * kPi) + 0.5 * ar.ln_det_ratio +
               pot.constant;
  return c;
}

ExpansionCoefficients to_n(const ExpansionCoefficients& m, int g) {
  if (m.variable != ExpansionCoefficients::Variable::in_k) throw DomainError("to_n: coefficients already in N");
  const double d = g - 1.0;
  ExpansionCoefficients c = m;
  c.variable = ExpansionCoefficients::Variable::in_n;
  c.linear = 2.0 * d * m.quad + m.linear;
  c.logn = m.logn + d * m.nlogn;
  c.constant = d * d * m.quad + d * m.nlogn + d * m.linear + m.constant;
  return c;
}

ExpansionCoefficients to_plain(const ExpansionCoefficients& m, int g, double ln_det_im_tau_value) {
  ExpansionCoefficients c = to_n(m, g);
  c.kind = ExpansionCoefficients::Kind::plain;
  c.constant += 0.5 * ln_det_im_tau_value + 0.5 * g * kLn2;
  return c;
}

ExpansionCoefficients coeffs_modified(const SurfaceSpec& s, const PotentialSpec& v, const GridPtr& grid) {
  require_numeric_genus(s);
  if (grid->surface().genus() != s.genus()) throw DomainError("coeffs_modified: grid is on another surface");
  return assemble_modified(s.genus(), arakelov_inputs(grid), potential_inputs(v, grid));
}

ExpansionCoefficients coeffs_plain(const SurfaceSpec& s, const PotentialSpec& v, const GridPtr& grid) {
  return to_plain(coeffs_modified(s, v, grid), s.genus(), ln_det_im_tau(s));
}

std::pair<double, double> theta_integral_check(const specfun::PeriodMatrix& tau, int resolution) {
  const int g = tau.genus();
  if (g < 1 || g > 2) throw DomainError("theta_integral_check: genus must be 1 or 2");
  if (resolution < 2) throw DomainError("theta_integral_check: resolution must be >= 2");
  const double closed = 1.0 / std::sqrt(std::pow(2.0, g) * tau.im_det());
  const int dims = 2 * g;
  long total = 1;
  for (int i = 0; i < dims; ++i) total *= resolution;
  const double h = 1.0 / resolution;
  KahanSum<double> acc;
  std::vector<cplx> z(static_cast<size_t>(g));
  std::vector<int> idx(static_cast<size_t>(dims), 0);
  for (long it = 0; it < total; ++it) {
    long rem = it;
    for (int d = 0; d < dims; ++d) {
      idx[static_cast<size_t>(d)] = static_cast<int>(rem % resolution);
      rem /= resolution;
    }
    // z_i = P_i + sum_j tau_ij Q_j
    for (int i = 0; i < g; ++i) {
      cplx zi = (idx[static_cast<size_t>(i)] + 0.5) * h;
      for (int j = 0; j < g; ++j) zi += tau(i, j) * ((idx[static_cast<size_t>(g + j)] + 0.5) * h);
      z[static_cast<size_t>(i)] = zi;
    }
    acc += specfun::theta_norm_sq(z, tau);
  }
  return {acc.value() / static_cast<double>(total), closed};
}

}  // namespace coulomb::expansion
