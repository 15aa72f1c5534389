#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "coulomb/common.hpp"
#include "coulomb/specfun.hpp"

namespace coulomb::geometry {

using specfun::TorusModulus;

// Genus 0 (Riemann sphere) or genus 1 (flat torus C / (Z + tau Z)).
class SurfaceSpec {
 public:
  static SurfaceSpec sphere();
  static SurfaceSpec torus(cplx tau);

  int genus() const { return genus_; }
  bool is_torus() const { return genus_ == 1; }
  const TorusModulus& modulus() const;
  cplx tau() const { return modulus().tau(); }
  double im_tau() const { return modulus().im(); }
  // Cached Dedekind eta of the modulus (torus only).
  cplx eta() const;

 private:
  SurfaceSpec() = default;
  int genus_ = 0;
  std::optional<TorusModulus> tau_;
  cplx eta_{};
};

enum class Chart { stereographic, fundamental_domain };

// Tensor grid in a fixed chart.
//  sphere: Gauss-Legendre in u = |z|^2/(1+|z|^2) (rows) x 2*res uniform angles (columns)
//  torus:  res x res midpoints in (P, Q), z = P + tau Q
// Node k sits at row k / cols(), column k % cols().
class QuadratureGrid {
 public:
  const SurfaceSpec& surface() const { return surface_; }
  Chart chart() const { return chart_; }
  int resolution() const { return resolution_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return nodes_.size(); }

  std::span<const cplx> nodes() const { return nodes_; }
  // Lebesgue weights in the chart (dx dy).
  std::span<const double> weights() const { return weights_; }
  // Canonical mass per node, weights * canonical density; sums to 1.
  std::span<const double> mass() const { return mass_; }

  // Sphere only: radial nodes/weights in u on [0, 1].
  std::span<const double> u_nodes() const { return u_nodes_; }
  std::span<const double> u_weights() const { return u_weights_; }

 private:
  friend std::shared_ptr<const QuadratureGrid> make_grid(const SurfaceSpec&, int);
  explicit QuadratureGrid(SurfaceSpec s) : surface_(std::move(s)) {}

  SurfaceSpec surface_;
  Chart chart_ = Chart::stereographic;
  int resolution_ = 0;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<cplx> nodes_;
  std::vector<double> weights_;
  std::vector<double> mass_;
  std::vector<double> u_nodes_;
  std::vector<double> u_weights_;
};

using GridPtr = std::shared_ptr<const QuadratureGrid>;

GridPtr make_grid(const SurfaceSpec& surface, int resolution);

// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

// Real samples aligned with the nodes of one grid.
struct ScalarField {
  ScalarField(GridPtr g, std::vector<double> v);
  static ScalarField constant(GridPtr g, double c);

  GridPtr grid;
  std::vector<double> values;

  size_t size() const { return values.size(); }
  double operator[](size_t i) const { return values[i]; }
};

void require_same_grid(const ScalarField& a, const ScalarField& b);

// Integral against the canonical volume form, sum of mass * f.
double integrate(const ScalarField& f);
double integrate(const QuadratureGrid& grid, std::span<const double> f);

// One-body potential from a small builtin family.
//  torus_fourier: V = sum c_{m,n} exp(2 i pi (m P + n Q)), c_{-m,-n} = conj(c_{m,n})
//  sphere_zonal:  V = a w^p, w = (1 - |z|^2)/(1 + |z|^2)
class PotentialSpec {
 public:
  enum class Family { zero, torus_fourier, sphere_zonal };
  using ModeMap = std::map<std::pair<int, int>, cplx>;

  static PotentialSpec zero();
  static PotentialSpec torus_fourier(ModeMap coefficients);
  static PotentialSpec sphere_zonal(int p, double a);

  Family family() const { return family_; }
  const ModeMap& modes() const { return modes_; }
  int degree() const { return p_; }
  double amplitude() const { return a_; }

  PotentialSpec scaled(double factor) const;

  double value(const SurfaceSpec& s, cplx z) const;
  // Analytic Delta_can V at z.
  double laplacian(const SurfaceSpec& s, cplx z) const;

 private:
  void require_surface(const SurfaceSpec& s) const;

  Family family_ = Family::zero;
  ModeMap modes_;
  int p_ = 0;
  double a_ = 0.0;
};

ScalarField sample(const PotentialSpec& v, const GridPtr& grid);
ScalarField laplacian_canonical(const PotentialSpec& v, const GridPtr& grid);
// Throws DomainError when min f_V = 1 + Delta_can V / 4 pi is below 1e-6.
void require_admissible(const PotentialSpec& v, const GridPtr& grid);
double min_equilibrium_density(const PotentialSpec& v, const GridPtr& grid);

double canonical_density(const SurfaceSpec& s, cplx z);
double arakelov_density(const SurfaceSpec& s, cplx z);
double volume_arakelov(const SurfaceSpec& s);
double sigma_arakelov(const SurfaceSpec& s);
// Canonical curvature, 8 pi on the sphere and 0 on the torus.
double curvature_canonical(const SurfaceSpec& s);

// (P, Q) coordinates of a torus point, z = P + tau Q.
std::pair<double, double> torus_coordinates(const SurfaceSpec& s, cplx z);
// Representative of z modulo the lattice with P, Q in [-1/2, 1/2).
cplx reduce_to_cell(const SurfaceSpec& s, cplx z);

double green_canonical(const SurfaceSpec& s, cplx z, cplx w);
// G(z, w) - ln|z - w| for z near w (finite at z = w).
double green_regular_part(const SurfaceSpec& s, cplx z, cplx w);

// Integral of f G(., w) against mu_can. The node cell containing w is
// replaced by an exact local integral plus a second-order compensation.
double green_integral(const QuadratureGrid& grid, std::span<const double> f, cplx w);
double green_mean(const QuadratureGrid& grid, cplx w);

// Spectral Delta_can of a sampled field (Fourier on the torus, spherical
// harmonics on the sphere). Both are symmetric with respect to the mass.
std::vector<double> apply_laplacian(const QuadratureGrid& grid, std::span<const double> f);
ScalarField apply_laplacian(const ScalarField& f);
// Mean-zero u with Delta_can u = rhs - (integral of rhs).
std::vector<double> solve_poisson(const QuadratureGrid& grid, std::span<const double> rhs);
ScalarField solve_poisson(const ScalarField& rhs);

void write_grid_csv(const QuadratureGrid& grid, std::ostream& out);
GridPtr read_grid_csv(std::istream& in);

}  // namespace coulomb::geometry
