#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "coulomb/geometry.hpp"

namespace coulomb::identities {

struct IdentityResult {
  std::string name;
  double deviation = 0.0;
  double tolerance = 0.0;

  // NaN deviations fail.
  bool pass() const { return deviation <= tolerance; }
};

struct SuiteOptions {
  std::uint64_t seed = 20240611;
  // Overrides keyed by identity name or by suite name.
  std::map<std::string, double> tolerances;

  double tolerance(const std::string& suite, const std::string& name, double fallback) const;
};

struct Suite {
  std::string name;
  std::string description;
  std::function<std::vector<IdentityResult>(const SuiteOptions&)> run;
};

const std::vector<Suite>& suites();
// Throws DomainError for an unknown suite.
std::vector<IdentityResult> run_suite(const std::string& name, const SuiteOptions& opts);

// Smooth random field: low Fourier modes on the torus, low-degree
// polynomials in the embedding coordinates on the sphere.
geometry::ScalarField random_smooth_field(const geometry::GridPtr& grid, std::mt19937_64& rng, double amplitude);
// Random chart point, uniform for the canonical measure.
cplx random_point(const geometry::SurfaceSpec& s, std::mt19937_64& rng);

}  // namespace coulomb::identities
