#include <cmath>
#include <random>
#include <vector>

#include "coulomb/functionals.hpp"
#include "coulomb/identities.hpp"
#include "doctest.h"

using namespace coulomb;
using namespace coulomb::functionals;
using geometry::make_grid;
using geometry::SurfaceSpec;

namespace {

// Height coordinate w = (1 - |z|^2) / (1 + |z|^2), Delta_can w = 8 pi w.
ScalarField height(const GridPtr& g, double eps) {
  std::vector<double> v(g->size());
  for (size_t k = 0; k < v.size(); ++k) {
    const double r2 = std::norm(g->nodes()[k]);
    v[k] = eps * (1.0 - r2) / (1.0 + r2);
  }
  return ScalarField(g, std::move(v));
}

// cos(2 pi (m P + n Q)) on the torus.
ScalarField torus_mode(const GridPtr& g, int m, int n, double eps) {
  std::vector<double> v(g->size());
  for (size_t k = 0; k < v.size(); ++k) {
    auto [P, Q] = geometry::torus_coordinates(g->surface(), g->nodes()[k]);
    v[k] = eps * std::cos(kTwoPi * (m * P + n * Q));
  }
  return ScalarField(g, std::move(v));
}

}  // namespace

TEST_CASE("metric basics") {
  const auto g = make_grid(SurfaceSpec::sphere(), 32);
  CHECK(Metric::canonical(g).volume() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(Metric::arakelov(g).volume() == doctest::Approx(kPi * std::exp(1.0)).epsilon(1e-13));
  const Metric m = Metric::canonical(g).conformal(height(g, 0.3));
  CHECK(m.kind == Metric::Kind::general);
  // Integral of exp(0.6 w) over u with w = 1 - 2 u.
  CHECK(m.volume() == doctest::Approx(std::sinh(0.6) / 0.6).epsilon(1e-12));
  // Gauss-Bonnet.
  const std::vector<double> r = m.curvature();
  const std::vector<double> mass = m.mass();
  double total = 0.0;
  for (size_t k = 0; k < r.size(); ++k) total += mass[k] * r[k];
  CHECK(total == doctest::Approx(8.0 * kPi).epsilon(1e-10));
}

TEST_CASE("liouville functional") {
  for (const SurfaceSpec& s : {SurfaceSpec::sphere(), SurfaceSpec::torus(cplx(0.3, 1.7))}) {
    const auto g = make_grid(s, 32);
    for (const Metric& ref : {Metric::canonical(g), Metric::arakelov(g)}) {
      for (double c : {-0.7, 0.0, 1.3}) {
        CHECK(s_liouville(ScalarField::constant(g, c), ref) ==
              doctest::Approx(8.0 * kPi * (1.0 - s.genus()) * c).epsilon(1e-12).scale(1.0));
      }
    }
  }
  const auto sg = make_grid(SurfaceSpec::sphere(), 32);
  // Dirichlet energy of eps w: 8 pi eps^2 / 3; the curvature term integrates w to zero.
  CHECK(s_liouville(height(sg, 0.2), Metric::canonical(sg)) == doctest::Approx(8.0 * kPi * 0.04 / 3.0).epsilon(1e-12));

  const auto tg = make_grid(SurfaceSpec::torus(cplx(0, 1)), 32);
  // Symbol 4 pi^2 |n - m tau|^2 / t and mean of cos^2 = 1/2.
  CHECK(s_liouville(torus_mode(tg, 1, 1, 0.1), Metric::canonical(tg)) ==
        doctest::Approx(4.0 * kPi * kPi * 2.0 * 0.01 / 2.0).epsilon(1e-12));
}

TEST_CASE("mabuchi and aubin-yau at the arakelov metric") {
  const auto sg = make_grid(SurfaceSpec::sphere(), 32);
  const Metric ar = Metric::arakelov(sg);
  const ScalarField sigma = ScalarField::constant(sg, -geometry::sigma_arakelov(sg->surface()));
  const ScalarField phi = kahler_potential(sigma, ar);
  CHECK(s_mabuchi(sigma, phi, ar) == doctest::Approx(-2.0 * (1.0 + std::log(kPi))).epsilon(1e-12));

  for (cplx tau : {cplx(0, 1), cplx(0.3, 1.7)}) {
    const SurfaceSpec t = SurfaceSpec::torus(tau);
    const auto tg = make_grid(t, 16);
    const Metric tar = Metric::arakelov(tg);
    const ScalarField ts = ScalarField::constant(tg, -geometry::sigma_arakelov(t));
    const double eta4 = std::pow(std::abs(t.eta()), 8);
    CHECK(s_mabuchi(ts, kahler_potential(ts, tar), tar) ==
          doctest::Approx(-std::log(16.0 * std::pow(kPi, 4) * t.im_tau() * t.im_tau() * eta4)).epsilon(1e-12));
  }

  const Metric can = Metric::canonical(sg);
  CHECK(s_aubin_yau(ScalarField::constant(sg, 0.0), can) == 0.0);
  const ScalarField p = height(sg, 0.4);
  for (double c : {-1.0, 2.5}) {
    std::vector<double> shifted(p.values);
    for (auto& x : shifted) x += c;
    CHECK(s_aubin_yau(ScalarField(sg, shifted), can) - s_aubin_yau(p, can) == doctest::Approx(c).epsilon(1e-12));
  }
  // -(1/4) 8 pi (0.16 / 3) + integral of 0.4 w.
  CHECK(s_aubin_yau(p, can) == doctest::Approx(-2.0 * kPi * 0.16 / 3.0).epsilon(1e-12));
}

TEST_CASE("kahler potential") {
  const auto g = make_grid(SurfaceSpec::sphere(), 48);
  const Metric can = Metric::canonical(g);
  const ScalarField sigma = height(g, 0.3);
  const ScalarField phi = kahler_potential(sigma, can);
  const std::vector<double> lap = geometry::apply_laplacian(*g, phi.values);
  const double vol = can.conformal(sigma).volume();
  double err = 0.0;
  for (size_t k = 0; k < lap.size(); ++k)
    err = std::max(err, std::abs(lap[k] - 2.0 / vol * (vol - std::exp(2.0 * sigma[k]))));
  CHECK(err < 1e-10);
  CHECK(std::abs(geometry::integrate(phi)) < 1e-13);
  const ConformalPair pair = make_pair(sigma, can);
  CHECK(pair.reference == Metric::Kind::canonical);
  CHECK(pair.phi.values == phi.values);
}

TEST_CASE("magnetic functionals") {
  const auto g = make_grid(SurfaceSpec::sphere(), 32);
  const Metric ar = Metric::arakelov(g);
  const ScalarField b0 = admissible_field(ar);
  const std::vector<double> mass = ar.mass();
  double total = 0.0;
  for (size_t k = 0; k < mass.size(); ++k) total += mass[k] * b0[k];
  CHECK(total == doctest::Approx(kTwoPi).epsilon(1e-13));

  const ScalarField psi = height(g, 0.25);
  std::vector<double> shifted(psi.values);
  for (auto& x : shifted) x += 0.8;
  const ScalarField psi_c(g, shifted);
  CHECK(s2(psi_c, ar, b0) - s2(psi, ar, b0) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(s2(ScalarField::constant(g, 0.0), ar, b0) == 0.0);

  // Changing h keeps the total flux.
  const ScalarField b1 = changed_field(b0, psi, ar);
  double flux = 0.0;
  for (size_t k = 0; k < mass.size(); ++k) flux += mass[k] * b1[k];
  CHECK(flux == doctest::Approx(kTwoPi).epsilon(1e-12));

  const ScalarField sigma = height(g, 0.1);
  CHECK(std::abs(s1(ScalarField::constant(g, 0.0), ScalarField::constant(g, 0.0), ar, b0)) < 1e-15);
  CHECK(s1(sigma, psi_c, ar, b0) - s1(sigma, psi, ar, b0) == doctest::Approx(-2.0 * 0.8).epsilon(1e-12));
}

TEST_CASE("cocycle suite over several seeds") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    identities::SuiteOptions opts;
    opts.seed = seed;
    for (const auto& r : identities::run_suite("cocycle", opts)) {
      INFO(r.name, " seed ", seed, " deviation ", r.deviation);
      CHECK(r.pass());
    }
  }
}

TEST_CASE("ricci potential and polyakov") {
  const auto g = make_grid(SurfaceSpec::sphere(), 48);
  CHECK(polyakov(Metric::canonical(g)) == 0.0);
  CHECK(polyakov(Metric::arakelov(g)) == 0.0);
  const Metric m = Metric::canonical(g).conformal(height(g, 0.3));
  const ScalarField psi = ricci_potential(m);
  const std::vector<double> r = m.curvature();
  const std::vector<double> mass = m.mass();
  const double vol = m.volume();
  double rbar = 0.0, mean_psi = 0.0;
  for (size_t k = 0; k < r.size(); ++k) {
    rbar += mass[k] * r[k] / vol;
    mean_psi += mass[k] * psi[k];
  }
  CHECK(rbar == doctest::Approx(8.0 * kPi / vol).epsilon(1e-10));
  CHECK(std::abs(mean_psi) < 1e-12);
  // Delta_rho = exp(-2 s) Delta_can.
  const std::vector<double> lap = geometry::apply_laplacian(*g, psi.values);
  double err = 0.0;
  for (size_t k = 0; k < lap.size(); ++k) err = std::max(err, std::abs(std::exp(-2.0 * m.s[k]) * lap[k] - (r[k] - rbar)));
  CHECK(err < 1e-8);
  // Polyakov is (1/4) integral of mu_rho Psi Delta_rho Psi, hence nonnegative.
  double direct = 0.0;
  for (size_t k = 0; k < r.size(); ++k) direct += 0.25 * mass[k] * r[k] * psi[k];
  CHECK(polyakov(m) == doctest::Approx(direct).epsilon(1e-12));
  CHECK(polyakov(m) > 0.0);
}

TEST_CASE("curly F") {
  const auto g = make_grid(SurfaceSpec::sphere(), 32);
  const CurlyF f = f_curly(Metric::canonical(g), ScalarField::constant(g, 1.0));
  CHECK(f.k_ln_k == doctest::Approx(0.5));
  CHECK(std::abs(f.k_coeff) < 1e-15);
  CHECK(f.ln_k == doctest::Approx(2.0 / 3.0));
  CHECK(std::abs(f.constant) < 1e-15);
  CHECK(f.at(std::exp(1.0)) == doctest::Approx(0.5 * std::exp(1.0) + 2.0 / 3.0));

  for (const SurfaceSpec& s : {SurfaceSpec::sphere(), SurfaceSpec::torus(cplx(0.3, 1.7))}) {
    const auto sg = make_grid(s, 32);
    const double sig = geometry::sigma_arakelov(s);
    const CurlyF fc = f_curly(Metric::canonical(sg), ScalarField::constant(sg, 1.0));
    const CurlyF fa = f_curly(Metric::arakelov(sg), ScalarField::constant(sg, 1.0 / geometry::volume_arakelov(s)));
    for (double k : {3.0, 40.0}) {
      const double expected = k * sig + 4.0 / 3.0 * (1.0 - s.genus()) * sig;
      CHECK(fc.at(k) - fa.at(k) == doctest::Approx(expected).epsilon(1e-11));
    }
  }
  CHECK_THROWS_AS(f_curly(Metric::canonical(g), ScalarField::constant(g, 2.0)), DomainError);
  CHECK_THROWS_AS(f_curly(Metric::canonical(g), ScalarField::constant(g, -1.0)), DomainError);
}

TEST_CASE("equilibrium measure") {
  const auto tg = make_grid(SurfaceSpec::torus(cplx(0, 1)), 128);
  const PotentialSpec v = PotentialSpec::torus_fourier({{{1, 0}, 0.05}, {{-1, 0}, 0.05}});
  const EquilibriumData eq = equilibrium(v, tg);
  double err = 0.0, mass = 0.0;
  for (size_t k = 0; k < eq.f_v.size(); ++k) {
    auto [P, Q] = geometry::torus_coordinates(tg->surface(), tg->nodes()[k]);
    err = std::max(err, std::abs(eq.f_v[k] - (1.0 + 0.1 * kPi * std::cos(kTwoPi * P))));
    mass += eq.mu_v_weights[k];
  }
  CHECK(err < 1e-12);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::abs(eq.c_v) < 1e-15);
  for (cplx y : {cplx(0.2, 0.3), cplx(0.55, 0.71)}) CHECK(std::abs(equilibrium_identity(eq, v, y) - eq.c_v) < 1e-5);

  const auto sg = make_grid(SurfaceSpec::sphere(), 128);
  const PotentialSpec zonal = PotentialSpec::sphere_zonal(2, 0.05);
  const EquilibriumData seq = equilibrium(zonal, sg);
  // c_V = (a / 2) integral of (1 - 2 u)^2 du.
  CHECK(seq.c_v == doctest::Approx(0.05 / 6.0).epsilon(1e-13));
  for (cplx y : {cplx(0.0, 0.0), cplx(0.2, 0.3), cplx(3.0, 1.0)})
    CHECK(std::abs(equilibrium_identity(seq, zonal, y) - seq.c_v) < 1e-5);

  CHECK_THROWS_AS(equilibrium(PotentialSpec::sphere_zonal(1, 0.6), sg), DomainError);
}
