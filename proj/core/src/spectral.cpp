#include <unsupported/Eigen/FFT>

#include <vector>

#include "coulomb/geometry.hpp"

namespace coulomb::geometry {

namespace {

using Multiplier = double (*)(double eigenvalue);

double forward(double lambda) { return lambda; }
double inverse(double lambda) { return lambda == 0.0 ? 0.0 : 1.0 / lambda; }

int signed_frequency(int k, int n) { return k <= n / 2 ? k : k - n; }

std::vector<double> torus_apply(const QuadratureGrid& grid, std::span<const double> f, Multiplier mult) {
  const int n = grid.resolution();
  const auto& s = grid.surface();
  const cplx tau = s.tau();
  const double t = s.im_tau();
  const size_t un = static_cast<size_t>(n);
  Eigen::FFT<double> fft;
  std::vector<cplx> in(un), out(un);
  std::vector<cplx> spec(un * un);

  // Rows (fixed P index i, varying Q index j), then columns.
  for (size_t i = 0; i < un; ++i) {
    for (size_t j = 0; j < un; ++j) in[j] = f[i * un + j];
    fft.fwd(out, in);
    for (size_t j = 0; j < un; ++j) spec[i * un + j] = out[j];
  }
  for (size_t j = 0; j < un; ++j) {
    for (size_t i = 0; i < un; ++i) in[i] = spec[i * un + j];
    fft.fwd(out, in);
    for (size_t i = 0; i < un; ++i) spec[i * un + j] = out[i];
  }
  for (size_t i = 0; i < un; ++i) {
    const int m = signed_frequency(static_cast<int>(i), n);
    for (size_t j = 0; j < un; ++j) {
      const int k = signed_frequency(static_cast<int>(j), n);
      // Nyquist modes are dropped so the operator stays real and symmetric.
      const bool nyquist = n % 2 == 0 && (2 * static_cast<int>(i) == n || 2 * static_cast<int>(j) == n);
      const double lambda = 4.0 * kPi * kPi * std::norm(static_cast<double>(k) - static_cast<double>(m) * tau) / t;
      spec[i * un + j] *= nyquist ? 0.0 : mult(lambda);
    }
  }
  for (size_t j = 0; j < un; ++j) {
    for (size_t i = 0; i < un; ++i) in[i] = spec[i * un + j];
    fft.inv(out, in);
    for (size_t i = 0; i < un; ++i) spec[i * un + j] = out[i];
  }
  std::vector<double> result(un * un);
  for (size_t i = 0; i < un; ++i) {
    for (size_t j = 0; j < un; ++j) in[j] = spec[i * un + j];
    fft.inv(out, in);
    for (size_t j = 0; j < un; ++j) result[i * un + j] = out[j].real();
  }
  return result;
}

// Orthonormal associated Legendre functions on [-1, 1] for fixed order m,
// degrees m..lmax, at every node. table[(l - m) * nx + i].
void legendre_column(int m, int lmax, std::span<const double> x, std::vector<double>& table) {
  const size_t nx = x.size();
  const size_t nl = static_cast<size_t>(lmax - m + 1);
  table.assign(nl * nx, 0.0);
  for (size_t i = 0; i < nx; ++i) {
    const double xi = x[i];
    const double sx = std::sqrt(std::max(0.0, 1.0 - xi * xi));
    double pmm = 1.0 / std::sqrt(2.0);
    for (int k = 1; k <= m; ++k) pmm *= std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * sx;
    table[i] = pmm;
    if (nl == 1) continue;
    double p1 = xi * std::sqrt(2.0 * m + 3.0) * pmm;
    table[nx + i] = p1;
    double p0 = pmm;
    for (int l = m + 2; l <= lmax; ++l) {
      const double ll = l, mm = m;
      const double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
      const double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - mm * mm) / (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
      const double p2 = a * (xi * p1 - b * p0);
      table[static_cast<size_t>(l - m) * nx + i] = p2;
      p0 = p1;
      p1 = p2;
    }
  }
}

std::vector<double> sphere_apply(const QuadratureGrid& grid, std::span<const double> f, Multiplier mult) {
  const size_t nu = static_cast<size_t>(grid.rows());
  const size_t nphi = static_cast<size_t>(grid.cols());
  const int lmax = grid.rows() - 1;
  const double dphi = kTwoPi / static_cast<double>(nphi);
  std::vector<double> x(nu), wx(nu);
  for (size_t i = 0; i < nu; ++i) {
    x[i] = 2.0 * grid.u_nodes()[i] - 1.0;
    wx[i] = 2.0 * grid.u_weights()[i];
  }

  // Angular coefficients g_i(m) = (1 / nphi) sum_j f_ij exp(-i m phi_j).
  Eigen::FFT<double> fft;
  std::vector<cplx> in(nphi), out(nphi);
  std::vector<cplx> g(nu * static_cast<size_t>(lmax + 1));
  for (size_t i = 0; i < nu; ++i) {
    for (size_t j = 0; j < nphi; ++j) in[j] = f[i * nphi + j];
    fft.fwd(out, in);
    for (int m = 0; m <= lmax; ++m)
      g[i * static_cast<size_t>(lmax + 1) + static_cast<size_t>(m)] =
          out[static_cast<size_t>(m)] * std::polar(1.0 / static_cast<double>(nphi), -m * 0.5 * dphi);
  }

  std::vector<cplx> h(g.size(), cplx{});
  std::vector<double> table;
  for (int m = 0; m <= lmax; ++m) {
    legendre_column(m, lmax, x, table);
    for (int l = m; l <= lmax; ++l) {
      const double* p = &table[static_cast<size_t>(l - m) * nu];
      cplx c{};
      for (size_t i = 0; i < nu; ++i) c += wx[i] * p[i] * g[i * static_cast<size_t>(lmax + 1) + static_cast<size_t>(m)];
      c *= mult(4.0 * kPi * l * (l + 1.0));
      for (size_t i = 0; i < nu; ++i) h[i * static_cast<size_t>(lmax + 1) + static_cast<size_t>(m)] += c * p[i];
    }
  }

  std::vector<double> result(nu * nphi);
  for (size_t i = 0; i < nu; ++i) {
    std::fill(in.begin(), in.end(), cplx{});
    for (int m = 0; m <= lmax; ++m) {
      const cplx v = h[i * static_cast<size_t>(lmax + 1) + static_cast<size_t>(m)] * std::polar(1.0, m * 0.5 * dphi);
      if (m == 0) {
        in[0] = v;
      } else {
        in[static_cast<size_t>(m)] = v;
        in[nphi - static_cast<size_t>(m)] = std::conj(v);
      }
    }
    fft.inv(out, in);
    for (size_t j = 0; j < nphi; ++j) result[i * nphi + j] = out[j].real() * static_cast<double>(nphi);
  }
  return result;
}

std::vector<double> spectral_apply(const QuadratureGrid& grid, std::span<const double> f, Multiplier mult) {
  if (f.size() != grid.size()) throw DomainError("spectral operator: length does not match grid");
  if (grid.surface().is_torus()) return torus_apply(grid, f, mult);
  return sphere_apply(grid, f, mult);
}

}  // namespace

std::vector<double> apply_laplacian(const QuadratureGrid& grid, std::span<const double> f) {
  return spectral_apply(grid, f, forward);
}

std::vector<double> solve_poisson(const QuadratureGrid& grid, std::span<const double> rhs) {
  return spectral_apply(grid, rhs, inverse);
}

}  // namespace coulomb::geometry
