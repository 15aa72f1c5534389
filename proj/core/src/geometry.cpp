#include "coulomb/geometry.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

namespace coulomb::geometry {

namespace {

constexpr double kE = std::numbers::e;

// Composite rule used for the singular cell: 40-point Gauss-Legendre on [0, 1].
struct UnitRule {
  std::vector<double> x, w;
  UnitRule() {
    auto [nodes, weights] = gauss_legendre(40);
    for (size_t i = 0; i < nodes.size(); ++i) {
      x.push_back(0.5 * (nodes[i] + 1.0));
      w.push_back(0.5 * weights[i]);
    }
  }
};

const UnitRule& unit_rule() {
  static const UnitRule rule;
  return rule;
}

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

// Exact integral of ln|z - w| dx dy over a convex polygon (counter-clockwise),
// split into triangles with apex w. Each radial integral is closed form.
double log_distance_cell_integral(std::span<const cplx> verts, cplx w) {
  const auto& rule = unit_rule();
  double total = 0.0;
  for (size_t e = 0; e < verts.size(); ++e) {
    const cplx a = verts[e] - w;
    const cplx b = verts[(e + 1) % verts.size()] - w;
    const double cr = cross(a, b);
    if (cr == 0.0) continue;
    double edge = 0.0;
    for (size_t q = 0; q < rule.x.size(); ++q) {
      const double r = std::abs(a + (b - a) * rule.x[q]);
      edge += rule.w[q] * 0.5 * cr * (std::log(r) - 0.5);
    }
    total += edge;
  }
  return total;
}

double torus_green_integral(const QuadratureGrid& grid, std::span<const double> f, cplx w) {
  const auto& s = grid.surface();
  const int n = grid.resolution();
  const double t = s.im_tau();
  const cplx tau = s.tau();
  auto [pw, qw] = torus_coordinates(s, w);
  pw -= std::floor(pw);
  qw -= std::floor(qw);
  const int ci = std::min(n - 1, static_cast<int>(std::floor(pw * n)));
  const int cj = std::min(n - 1, static_cast<int>(std::floor(qw * n)));
  const size_t c = static_cast<size_t>(ci) * static_cast<size_t>(n) + static_cast<size_t>(cj);
  const cplx wrep = pw + tau * qw;

  const auto nodes = grid.nodes();
  const auto mass = grid.mass();
  KahanSum<double> acc;
  for (size_t k = 0; k < nodes.size(); ++k) {
    if (k == c) continue;
    acc += f[k] * mass[k] * green_canonical(s, nodes[k], w);
  }
  const double h = 1.0 / n;
  const std::array<cplx, 4> verts = {
      ci * h + tau * (cj * h), (ci + 1) * h + tau * (cj * h),
      (ci + 1) * h + tau * ((cj + 1) * h), ci * h + tau * ((cj + 1) * h)};
  const double cell = log_distance_cell_integral(verts, wrep) / t +
                      mass[c] * green_regular_part(s, nodes[c], wrep);
  const double bias = kPi * (1.0 + std::norm(tau)) * h * h / (24.0 * t);
  acc += f[c] * (cell - bias);
  return acc.value();
}

// w in a polar ring, where the (u, phi) cell chart degenerates. Since G(., w)
// integrates to zero, subtract the ring average of f first.
double sphere_green_polar(const QuadratureGrid& grid, std::span<const double> f, cplx w, int ring) {
  const auto& s = grid.surface();
  const auto nodes = grid.nodes();
  const auto mass = grid.mass();
  const size_t nphi = static_cast<size_t>(grid.cols());
  const size_t first = static_cast<size_t>(ring) * nphi;
  KahanSum<double> ring_f, ring_m;
  for (size_t k = first; k < first + nphi; ++k) {
    ring_f += f[k] * mass[k];
    ring_m += mass[k];
  }
  const double fbar = ring_f.value() / ring_m.value();
  KahanSum<double> acc;
  for (size_t k = 0; k < nodes.size(); ++k) {
    if (nodes[k] == w) continue;
    acc += (f[k] - fbar) * mass[k] * green_canonical(s, nodes[k], w);
  }
  return acc.value();
}

double sphere_green_integral(const QuadratureGrid& grid, std::span<const double> f, cplx w) {
  const auto& s = grid.surface();
  const auto un = grid.u_nodes();
  const auto uw = grid.u_weights();
  const int nphi = grid.cols();
  const double dphi = kTwoPi / nphi;

  const double uw0 = std::norm(w) / (1.0 + std::norm(w));
  double pw = std::arg(w);
  if (pw < 0.0) pw += kTwoPi;

  // Cell boundaries in u from cumulative weights; each contains its node.
  std::vector<double> bu(un.size() + 1, 0.0);
  for (size_t i = 0; i < un.size(); ++i) bu[i + 1] = bu[i] + uw[i];
  bu.back() = 1.0;
  const auto it = std::upper_bound(bu.begin(), bu.end(), uw0);
  const int ci = std::clamp(static_cast<int>(it - bu.begin()) - 1, 0, grid.rows() - 1);
  const int cj = std::clamp(static_cast<int>(std::floor(pw / dphi)), 0, nphi - 1);
  if (ci == 0 || ci == grid.rows() - 1) return sphere_green_polar(grid, f, w, ci);
  const size_t c = static_cast<size_t>(ci) * static_cast<size_t>(nphi) + static_cast<size_t>(cj);

  const auto nodes = grid.nodes();
  const auto mass = grid.mass();
  KahanSum<double> acc;
  for (size_t k = 0; k < nodes.size(); ++k) {
    if (k == c) continue;
    acc += f[k] * mass[k] * green_canonical(s, nodes[k], w);
  }

  // Integral of G du dphi / 2 pi over the cell, polar about the apex w in
  // (u, phi); radial substitution t = v^2 removes the logarithm at the apex.
  auto g_uv = [&](double u, double phi) {
    const double r = std::sqrt(u / (1.0 - u));
    return green_canonical(s, std::polar(r, phi), w);
  };
  const std::array<std::pair<double, double>, 4> verts = {
      std::pair{bu[static_cast<size_t>(ci)], cj * dphi},
      std::pair{bu[static_cast<size_t>(ci) + 1], cj * dphi},
      std::pair{bu[static_cast<size_t>(ci) + 1], (cj + 1) * dphi},
      std::pair{bu[static_cast<size_t>(ci)], (cj + 1) * dphi}};
  const auto& rule = unit_rule();
  double cell = 0.0;
  for (size_t e = 0; e < 4; ++e) {
    const double a0 = verts[e].first - uw0, a1 = verts[e].second - pw;
    const double b0 = verts[(e + 1) % 4].first - uw0, b1 = verts[(e + 1) % 4].second - pw;
    const double cr = a0 * b1 - a1 * b0;
    if (cr == 0.0) continue;
    for (size_t p = 0; p < rule.x.size(); ++p) {
      const double e0 = a0 + (b0 - a0) * rule.x[p];
      const double e1 = a1 + (b1 - a1) * rule.x[p];
      double radial = 0.0;
      for (size_t q = 0; q < rule.x.size(); ++q) {
        const double v = rule.x[q];
        const double tt = v * v;
        radial += rule.w[q] * 2.0 * v * tt * g_uv(uw0 + tt * e0, pw + tt * e1);
      }
      cell += rule.w[p] * cr * radial;
    }
  }
  cell /= kTwoPi;
  const double s2 = uw0 * (1.0 - uw0);
  const double wu = uw[static_cast<size_t>(ci)];
  const double bias = (wu * wu / 24.0 * kPi / (2.0 * s2) + dphi * dphi / 24.0 * kPi * 2.0 * s2) / kTwoPi;
  acc += f[c] * (cell - bias);
  return acc.value();
}

}  // namespace

SurfaceSpec SurfaceSpec::sphere() { return SurfaceSpec{}; }

SurfaceSpec SurfaceSpec::torus(cplx tau) {
  SurfaceSpec s;
  s.genus_ = 1;
  s.tau_.emplace(tau);
  s.eta_ = specfun::dedekind_eta(*s.tau_);
  return s;
}

const TorusModulus& SurfaceSpec::modulus() const {
  if (!tau_) throw DomainError("SurfaceSpec: the sphere has no modulus");
  return *tau_;
}

cplx SurfaceSpec::eta() const {
  if (!tau_) throw DomainError("SurfaceSpec: the sphere has no modulus");
  return eta_;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: n must be positive");
  std::vector<double> x(static_cast<size_t>(n)), w(static_cast<size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
    x[static_cast<size_t>(i)] = -z;
    x[static_cast<size_t>(n - 1 - i)] = z;
    w[static_cast<size_t>(i)] = wi;
    w[static_cast<size_t>(n - 1 - i)] = wi;
  }
  if (n % 2 == 1) x[static_cast<size_t>(n / 2)] = 0.0;
  return {x, w};
}

GridPtr make_grid(const SurfaceSpec& surface, int resolution) {
  if (resolution < 8) throw DomainError("make_grid: resolution must be >= 8");
  auto g = std::shared_ptr<QuadratureGrid>(new QuadratureGrid(surface));
  g->resolution_ = resolution;
  if (surface.is_torus()) {
    const int n = resolution;
    const cplx tau = surface.tau();
    const double t = surface.im_tau();
    g->chart_ = Chart::fundamental_domain;
    g->rows_ = g->cols_ = n;
    const size_t count = static_cast<size_t>(n) * static_cast<size_t>(n);
    g->nodes_.reserve(count);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g->nodes_.push_back((i + 0.5) / n + tau * ((j + 0.5) / n));
    g->weights_.assign(count, t / (static_cast<double>(n) * n));
    g->mass_.assign(count, 1.0 / (static_cast<double>(n) * n));
    return g;
  }
  const int nu = resolution;
  const int nphi = 2 * resolution;
  g->chart_ = Chart::stereographic;
  g->rows_ = nu;
  g->cols_ = nphi;
  auto [x, wx] = gauss_legendre(nu);
  for (int i = 0; i < nu; ++i) {
    g->u_nodes_.push_back(0.5 * (x[static_cast<size_t>(i)] + 1.0));
    g->u_weights_.push_back(0.5 * wx[static_cast<size_t>(i)]);
  }
  const size_t count = static_cast<size_t>(nu) * static_cast<size_t>(nphi);
  g->nodes_.reserve(count);
  g->weights_.reserve(count);
  g->mass_.reserve(count);
  for (int i = 0; i < nu; ++i) {
    const double u = g->u_nodes_[static_cast<size_t>(i)];
    const double r = std::sqrt(u / (1.0 - u));
    const double m = g->u_weights_[static_cast<size_t>(i)] / nphi;
    for (int j = 0; j < nphi; ++j) {
      const cplx z = std::polar(r, (j + 0.5) * kTwoPi / nphi);
      g->nodes_.push_back(z);
      g->mass_.push_back(m);
      g->weights_.push_back(m / canonical_density(surface, z));
    }
  }
  return g;
}

ScalarField::ScalarField(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (!grid) throw DomainError("ScalarField: null grid");
  if (values.size() != grid->size()) throw DomainError("ScalarField: length does not match grid");
}

ScalarField ScalarField::constant(GridPtr g, double c) {
  const size_t n = g->size();
  return ScalarField(std::move(g), std::vector<double>(n, c));
}

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (a.grid != b.grid) throw DomainError("fields live on different grids");
}

double integrate(const QuadratureGrid& grid, std::span<const double> f) {
  if (f.size() != grid.size()) throw DomainError("integrate: length does not match grid");
  const auto m = grid.mass();
  KahanSum<double> acc;
  for (size_t k = 0; k < f.size(); ++k) acc += m[k] * f[k];
  return acc.value();
}

double integrate(const ScalarField& f) { return integrate(*f.grid, f.values); }

PotentialSpec PotentialSpec::zero() { return PotentialSpec{}; }

PotentialSpec PotentialSpec::torus_fourier(ModeMap coefficients) {
  double scale = 0.0;
  for (const auto& [mn, c] : coefficients) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw DomainError("torus_fourier: non-finite coefficient");
    scale = std::max(scale, std::abs(c));
  }
  for (const auto& [mn, c] : coefficients) {
    const auto it = coefficients.find({-mn.first, -mn.second});
    const cplx partner = it == coefficients.end() ? cplx{} : it->second;
    if (std::abs(partner - std::conj(c)) > 1e-14 * std::max(scale, 1.0))
      throw DomainError("torus_fourier: coefficients must satisfy c(-m,-n) = conj(c(m,n))");
  }
  PotentialSpec v;
  v.family_ = Family::torus_fourier;
  v.modes_ = std::move(coefficients);
  return v;
}

PotentialSpec PotentialSpec::sphere_zonal(int p, double a) {
  if (p < 0) throw DomainError("sphere_zonal: degree must be non-negative");
  if (!std::isfinite(a)) throw DomainError("sphere_zonal: non-finite amplitude");
  PotentialSpec v;
  v.family_ = Family::sphere_zonal;
  v.p_ = p;
  v.a_ = a;
  return v;
}

PotentialSpec PotentialSpec::scaled(double factor) const {
  PotentialSpec v = *this;
  for (auto& [mn, c] : v.modes_) c *= factor;
  v.a_ *= factor;
  return v;
}

void PotentialSpec::require_surface(const SurfaceSpec& s) const {
  if (family_ == Family::torus_fourier && !s.is_torus())
    throw DomainError("torus_fourier potential needs a genus-1 surface");
  if (family_ == Family::sphere_zonal && s.is_torus())
    throw DomainError("sphere_zonal potential needs a genus-0 surface");
}

double PotentialSpec::value(const SurfaceSpec& s, cplx z) const {
  require_surface(s);
  switch (family_) {
    case Family::zero:
      return 0.0;
    case Family::torus_fourier: {
      const auto [P, Q] = torus_coordinates(s, z);
      KahanSum<double> acc;
      for (const auto& [mn, c] : modes_)
        acc += (c * std::exp(cplx{0.0, kTwoPi * (mn.first * P + mn.second * Q)})).real();
      return acc.value();
    }
    case Family::sphere_zonal: {
      const double w = (1.0 - std::norm(z)) / (1.0 + std::norm(z));
      return a_ * std::pow(w, p_);
    }
  }
  return 0.0;
}

double PotentialSpec::laplacian(const SurfaceSpec& s, cplx z) const {
  require_surface(s);
  switch (family_) {
    case Family::zero:
      return 0.0;
    case Family::torus_fourier: {
      const auto [P, Q] = torus_coordinates(s, z);
      const cplx tau = s.tau();
      const double t = s.im_tau();
      KahanSum<double> acc;
      for (const auto& [mn, c] : modes_) {
        const double symbol = 4.0 * kPi * kPi * std::norm(static_cast<double>(mn.second) - static_cast<double>(mn.first) * tau) / t;
        acc += symbol * (c * std::exp(cplx{0.0, kTwoPi * (mn.first * P + mn.second * Q)})).real();
      }
      return acc.value();
    }
    case Family::sphere_zonal: {
      const double w = (1.0 - std::norm(z)) / (1.0 + std::norm(z));
      const double p = p_;
      double v = p * (p + 1.0) * std::pow(w, p_);
      if (p_ >= 2) v -= p * (p - 1.0) * std::pow(w, p_ - 2);
      return 4.0 * kPi * a_ * v;
    }
  }
  return 0.0;
}

ScalarField sample(const PotentialSpec& v, const GridPtr& grid) {
  std::vector<double> out;
  out.reserve(grid->size());
  for (const cplx z : grid->nodes()) out.push_back(v.value(grid->surface(), z));
  return ScalarField(grid, std::move(out));
}

ScalarField laplacian_canonical(const PotentialSpec& v, const GridPtr& grid) {
  std::vector<double> out;
  out.reserve(grid->size());
  for (const cplx z : grid->nodes()) out.push_back(v.laplacian(grid->surface(), z));
  return ScalarField(grid, std::move(out));
}

double min_equilibrium_density(const PotentialSpec& v, const GridPtr& grid) {
  double m = std::numeric_limits<double>::infinity();
  for (const cplx z : grid->nodes()) m = std::min(m, 1.0 + v.laplacian(grid->surface(), z) / (4.0 * kPi));
  return m;
}

void require_admissible(const PotentialSpec& v, const GridPtr& grid) {
  const double m = min_equilibrium_density(v, grid);
  if (!(m > 1e-6)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "potential not quasi-subharmonic: min f_V = %.6g", m);
    throw DomainError(buf);
  }
}

double canonical_density(const SurfaceSpec& s, cplx z) {
  if (s.is_torus()) return 1.0 / s.im_tau();
  const double d = 1.0 + std::norm(z);
  return 1.0 / (kPi * d * d);
}

double arakelov_density(const SurfaceSpec& s, cplx z) {
  if (s.is_torus()) {
    const double a = std::abs(s.eta());
    return 4.0 * kPi * kPi * a * a * a * a;
  }
  const double d = 1.0 + std::norm(z);
  return kE / (d * d);
}

double volume_arakelov(const SurfaceSpec& s) {
  if (s.is_torus()) {
    const double a = std::abs(s.eta());
    return 4.0 * kPi * kPi * s.im_tau() * a * a * a * a;
  }
  return kPi * kE;
}

double sigma_arakelov(const SurfaceSpec& s) {
  if (s.is_torus()) return std::log(kTwoPi * std::sqrt(s.im_tau()) * std::norm(s.eta()));
  return 0.5 * (1.0 + std::log(kPi));
}

double curvature_canonical(const SurfaceSpec& s) { return s.is_torus() ? 0.0 : 8.0 * kPi; }

std::pair<double, double> torus_coordinates(const SurfaceSpec& s, cplx z) {
  const cplx tau = s.tau();
  const double Q = z.imag() / tau.imag();
  return {z.real() - Q * tau.real(), Q};
}

cplx reduce_to_cell(const SurfaceSpec& s, cplx z) {
  auto [P, Q] = torus_coordinates(s, z);
  P -= std::floor(P + 0.5);
  Q -= std::floor(Q + 0.5);
  return P + s.tau() * Q;
}

double green_canonical(const SurfaceSpec& s, cplx z, cplx w) {
  if (s.is_torus()) {
    const cplx d = reduce_to_cell(s, z - w);
    if (std::abs(d) == 0.0) throw DomainError("green_canonical: coincident points");
    const double y = d.imag();
    return std::log(std::abs(specfun::jacobi_theta1(d, s.modulus()) / s.eta())) - kPi * y * y / s.im_tau();
  }
  const double dist = std::abs(z - w);
  if (dist == 0.0) throw DomainError("green_canonical: coincident points");
  return 0.5 + std::log(dist) - 0.5 * std::log1p(std::norm(z)) - 0.5 * std::log1p(std::norm(w));
}

double green_regular_part(const SurfaceSpec& s, cplx z, cplx w) {
  if (!s.is_torus()) return 0.5 - 0.5 * std::log1p(std::norm(z)) - 0.5 * std::log1p(std::norm(w));
  const cplx d = reduce_to_cell(s, z - w);
  // theta_1(d) = 2 pi eta^3 d (1 + O(d^2)).
  if (std::abs(d) < 1e-8) return std::log(kTwoPi * std::norm(s.eta()));
  const double y = d.imag();
  return std::log(std::abs(specfun::jacobi_theta1(d, s.modulus()) / (d * s.eta()))) - kPi * y * y / s.im_tau();
}

double green_integral(const QuadratureGrid& grid, std::span<const double> f, cplx w) {
  if (f.size() != grid.size()) throw DomainError("green_integral: length does not match grid");
  if (grid.surface().is_torus()) return torus_green_integral(grid, f, w);
  return sphere_green_integral(grid, f, w);
}

double green_mean(const QuadratureGrid& grid, cplx w) {
  const std::vector<double> one(grid.size(), 1.0);
  return green_integral(grid, one, w);
}

ScalarField apply_laplacian(const ScalarField& f) { return ScalarField(f.grid, apply_laplacian(*f.grid, f.values)); }

ScalarField solve_poisson(const ScalarField& rhs) { return ScalarField(rhs.grid, solve_poisson(*rhs.grid, rhs.values)); }

void write_grid_csv(const QuadratureGrid& grid, std::ostream& out) {
  const auto& s = grid.surface();
  char buf[160];
  const double re = s.is_torus() ? s.tau().real() : 0.0;
  const double im = s.is_torus() ? s.tau().imag() : 0.0;
  std::snprintf(buf, sizeof buf, "# coulomb-grid v1 %d %.17g %.17g %d\n", s.genus(), re, im, grid.resolution());
  out << buf << "re,im,weight\n";
  const auto nodes = grid.nodes();
  const auto w = grid.weights();
  for (size_t k = 0; k < nodes.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", nodes[k].real(), nodes[k].imag(), w[k]);
    out << buf;
  }
}

GridPtr read_grid_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("read_grid_csv: empty input");
  std::istringstream head(line);
  std::string hash, tag, version;
  int genus = -1, res = 0;
  double re = 0.0, im = 0.0;
  head >> hash >> tag >> version >> genus >> re >> im >> res;
  if (hash != "#" || tag != "coulomb-grid" || version != "v1" || head.fail())
    throw DomainError("read_grid_csv: bad header");
  if (genus != 0 && genus != 1) throw DomainError("read_grid_csv: unsupported genus");
  const SurfaceSpec s = genus == 1 ? SurfaceSpec::torus({re, im}) : SurfaceSpec::sphere();
  GridPtr g = make_grid(s, res);
  if (!std::getline(in, line) || line != "re,im,weight") throw DomainError("read_grid_csv: bad column row");
  const auto nodes = g->nodes();
  const auto w = g->weights();
  size_t k = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (k >= nodes.size()) throw DomainError("read_grid_csv: too many rows");
    double a = 0.0, b = 0.0, c = 0.0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &a, &b, &c) != 3) throw DomainError("read_grid_csv: bad row");
    const double tol = 1e-12 * std::max(1.0, std::abs(nodes[k]));
    if (std::abs(cplx{a, b} - nodes[k]) > tol || std::abs(c - w[k]) > 1e-12 * std::max(1.0, w[k]))
      throw DomainError("read_grid_csv: rows do not match the header grid");
    ++k;
  }
  if (k != nodes.size()) throw DomainError("read_grid_csv: row count does not match header");
  return g;
}

}  // namespace coulomb::geometry
