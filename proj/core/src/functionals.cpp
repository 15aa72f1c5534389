#include "coulomb/functionals.hpp"

#include <algorithm>
#include <cmath>

namespace coulomb::functionals {

namespace {

using geometry::QuadratureGrid;

void require_grid(const ScalarField& f, const Metric& m) {
  if (f.grid != m.grid) throw DomainError("field and metric live on different grids");
}

// Integral of mu_can a b.
double dot(const QuadratureGrid& g, std::span<const double> a, std::span<const double> b) {
  const auto mass = g.mass();
  KahanSum<double> acc;
  for (size_t k = 0; k < a.size(); ++k) acc += mass[k] * a[k] * b[k];
  return acc.value();
}

// Integral of mu_can f Delta_can f.
double dirichlet(const QuadratureGrid& g, std::span<const double> f) {
  return dot(g, f, geometry::apply_laplacian(g, f));
}

// mu_rho R_rho / mu_can at every node.
std::vector<double> curvature_density(const Metric& m) {
  const double r0 = geometry::curvature_canonical(m.grid->surface());
  std::vector<double> out = geometry::apply_laplacian(*m.grid, m.s);
  for (auto& v : out) v = r0 + 2.0 * v;
  return out;
}

// exp(2 s) at every node.
std::vector<double> conformal_factor(const Metric& m) {
  std::vector<double> out(m.s.size());
  std::transform(m.s.begin(), m.s.end(), out.begin(), [](double s) { return std::exp(2.0 * s); });
  return out;
}

}  // namespace

Metric Metric::canonical(const GridPtr& grid) { return Metric{grid, std::vector<double>(grid->size(), 0.0), Kind::canonical}; }

Metric Metric::arakelov(const GridPtr& grid) {
  const double s = geometry::sigma_arakelov(grid->surface());
  return Metric{grid, std::vector<double>(grid->size(), s), Kind::arakelov};
}

Metric Metric::conformal(const ScalarField& sigma) const {
  require_grid(sigma, *this);
  Metric out{grid, s, Kind::general};
  for (size_t k = 0; k < s.size(); ++k) out.s[k] += sigma[k];
  return out;
}

double Metric::volume() const { return geometry::integrate(*grid, conformal_factor(*this)); }

std::vector<double> Metric::mass() const {
  std::vector<double> out = conformal_factor(*this);
  const auto m = grid->mass();
  for (size_t k = 0; k < out.size(); ++k) out[k] *= m[k];
  return out;
}

std::vector<double> Metric::curvature() const {
  std::vector<double> out = curvature_density(*this);
  for (size_t k = 0; k < out.size(); ++k) out[k] *= std::exp(-2.0 * s[k]);
  return out;
}

ScalarField kahler_potential(const ScalarField& sigma, const Metric& ref) {
  require_grid(sigma, ref);
  const auto& g = *ref.grid;
  const std::vector<double> e0 = conformal_factor(ref);
  const double vol0 = geometry::integrate(g, e0);
  std::vector<double> e(sigma.size());
  for (size_t k = 0; k < e.size(); ++k) e[k] = e0[k] * std::exp(2.0 * sigma[k]);
  const double vol = geometry::integrate(g, e);
  // Delta_can phi = exp(2 s) Delta_0 phi.
  std::vector<double> rhs(e.size());
  for (size_t k = 0; k < e.size(); ++k) rhs[k] = (2.0 / vol) * (vol / vol0 * e0[k] - e[k]);
  return ScalarField(ref.grid, geometry::solve_poisson(g, rhs));
}

ConformalPair make_pair(const ScalarField& sigma, const Metric& ref) {
  const Metric::Kind kind = ref.kind == Metric::Kind::arakelov ? Metric::Kind::arakelov : Metric::Kind::canonical;
  return ConformalPair{sigma, kahler_potential(sigma, ref), kind};
}

double s_liouville(const ScalarField& sigma, const Metric& ref) {
  require_grid(sigma, ref);
  const auto& g = *ref.grid;
  return dirichlet(g, sigma.values) + dot(g, curvature_density(ref), sigma.values);
}

double s_mabuchi(const ScalarField& sigma, const ScalarField& phi, const Metric& ref) {
  require_grid(sigma, ref);
  require_grid(phi, ref);
  const auto& g = *ref.grid;
  const double chi_term = 1.0 - ref.genus();
  const std::vector<double> e0 = conformal_factor(ref);
  const double vol0 = geometry::integrate(g, e0);
  std::vector<double> e(sigma.size()), se(sigma.size());
  for (size_t k = 0; k < e.size(); ++k) {
    e[k] = e0[k] * std::exp(2.0 * sigma[k]);
    se[k] = sigma[k] * e[k];
  }
  const double vol = geometry::integrate(g, e);
  double total = 0.0;
  if (chi_term != 0.0) {
    total += -kTwoPi * chi_term * dirichlet(g, phi.values);
    total += 8.0 * kPi * chi_term / vol0 * dot(g, e0, phi.values);
  }
  total -= dot(g, curvature_density(ref), phi.values);
  total += 4.0 * geometry::integrate(g, se) / vol;
  return total;
}

double s_aubin_yau(const ScalarField& phi, const Metric& ref) {
  require_grid(phi, ref);
  const auto& g = *ref.grid;
  const std::vector<double> e0 = conformal_factor(ref);
  const double vol0 = geometry::integrate(g, e0);
  return -0.25 * dirichlet(g, phi.values) + dot(g, e0, phi.values) / vol0;
}

double s1(const ScalarField& sigma, const ScalarField& psi, const Metric& ref, const ScalarField& b0) {
  require_grid(sigma, ref);
  require_grid(psi, ref);
  require_grid(b0, ref);
  const auto& g = *ref.grid;
  const std::vector<double> e0 = conformal_factor(ref);
  const std::vector<double> lap_psi = geometry::apply_laplacian(g, psi.values);
  std::vector<double> src(e0.size());
  for (size_t k = 0; k < src.size(); ++k) src[k] = e0[k] * b0[k] - 0.5 * lap_psi[k];
  const double total = -0.5 * dot(g, psi.values, curvature_density(ref)) + 2.0 * dot(g, sigma.values, src);
  return total / kTwoPi;
}

double s2(const ScalarField& psi, const Metric& ref, const ScalarField& b0) {
  require_grid(psi, ref);
  require_grid(b0, ref);
  const auto& g = *ref.grid;
  const std::vector<double> e0 = conformal_factor(ref);
  std::vector<double> eb(e0.size());
  for (size_t k = 0; k < eb.size(); ++k) eb[k] = e0[k] * b0[k];
  return (-0.25 * dirichlet(g, psi.values) + dot(g, eb, psi.values)) / kTwoPi;
}

ScalarField admissible_field(const Metric& ref) {
  std::vector<double> b(ref.s.size());
  std::transform(ref.s.begin(), ref.s.end(), b.begin(), [](double s) { return kTwoPi * std::exp(-2.0 * s); });
  return ScalarField(ref.grid, std::move(b));
}

ScalarField changed_field(const ScalarField& b0, const ScalarField& psi, const Metric& ref) {
  require_grid(b0, ref);
  require_grid(psi, ref);
  const std::vector<double> lap = geometry::apply_laplacian(*ref.grid, psi.values);
  std::vector<double> b(b0.size());
  for (size_t k = 0; k < b.size(); ++k) b[k] = b0[k] - 0.5 * std::exp(-2.0 * ref.s[k]) * lap[k];
  return ScalarField(ref.grid, std::move(b));
}

ScalarField ricci_potential(const Metric& m) {
  if (m.genus() > 1) throw DomainError("ricci_potential: genus >= 2 unsupported");
  const auto& g = *m.grid;
  if (m.kind != Metric::Kind::general) return ScalarField::constant(m.grid, 0.0);
  const std::vector<double> e = conformal_factor(m);
  const double vol = geometry::integrate(g, e);
  const double rbar = 8.0 * kPi * (1.0 - m.genus()) / vol;
  // Delta_can Psi = exp(2 s) (R - rbar) = mu_rho R / mu_can - rbar exp(2 s).
  std::vector<double> rhs = curvature_density(m);
  for (size_t k = 0; k < rhs.size(); ++k) rhs[k] -= rbar * e[k];
  std::vector<double> psi = geometry::solve_poisson(g, rhs);
  const double shift = geometry::integrate(g, [&] {
    std::vector<double> pe(psi.size());
    for (size_t k = 0; k < pe.size(); ++k) pe[k] = psi[k] * e[k];
    return pe;
  }()) / vol;
  for (auto& v : psi) v -= shift;
  return ScalarField(m.grid, std::move(psi));
}

double polyakov(const Metric& m) {
  if (m.genus() > 1) throw DomainError("polyakov: genus >= 2 unsupported");
  if (m.kind != Metric::Kind::general) return 0.0;
  const ScalarField psi = ricci_potential(m);
  return 0.25 * dot(*m.grid, curvature_density(m), psi.values);
}

double CurlyF::at(double k) const {
  const double lk = std::log(k);
  return k_ln_k * k * lk + k_coeff * k + ln_k * lk + constant;
}

CurlyF f_curly(const Metric& m, const ScalarField& b) {
  require_grid(b, m);
  const auto& g = *m.grid;
  if (*std::min_element(b.values.begin(), b.values.end()) <= 0.0)
    throw DomainError("f_curly: magnetic density must be positive");
  const std::vector<double> mass = m.mass();
  KahanSum<double> total_b;
  for (size_t k = 0; k < b.size(); ++k) total_b += mass[k] * b[k];
  if (std::abs(total_b.value() - 1.0) > 1e-8) throw DomainError("f_curly: magnetic density must have unit mass");

  std::vector<double> lnb(b.size()), blnb(b.size());
  for (size_t k = 0; k < b.size(); ++k) {
    lnb[k] = std::log(b[k]);
    blnb[k] = b[k] * lnb[k];
  }
  KahanSum<double> ent;
  for (size_t k = 0; k < b.size(); ++k) ent += mass[k] * blnb[k];

  CurlyF f;
  f.k_ln_k = 0.5 * total_b.value();
  f.k_coeff = 0.5 * ent.value();
  f.ln_k = 2.0 / 3.0 * (1.0 - m.genus());
  f.constant = dot(g, curvature_density(m), lnb) / (12.0 * kPi) + dirichlet(g, lnb) / (48.0 * kPi);
  return f;
}

EquilibriumData equilibrium(const PotentialSpec& v, const GridPtr& grid) {
  geometry::require_admissible(v, grid);
  ScalarField lap = geometry::laplacian_canonical(v, grid);
  std::vector<double> f(lap.size()), w(lap.size());
  const auto mass = grid->mass();
  for (size_t k = 0; k < f.size(); ++k) {
    f[k] = 1.0 + lap[k] / (4.0 * kPi);
    w[k] = f[k] * mass[k];
  }
  const double c = 0.5 * geometry::integrate(geometry::sample(v, grid));
  return EquilibriumData{ScalarField(grid, std::move(f)), std::move(w), c};
}

double equilibrium_identity(const EquilibriumData& eq, const PotentialSpec& v, cplx y) {
  const auto& g = *eq.f_v.grid;
  return geometry::green_integral(g, eq.f_v.values, y) + 0.5 * v.value(g.surface(), y);
}

}  // namespace coulomb::functionals
