#include "coulomb/harness.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include "coulomb/exactpf.hpp"
#include "coulomb/expansion.hpp"
#include "coulomb/functionals.hpp"
#include "coulomb/identities.hpp"

namespace coulomb::harness {

namespace {

using config::ConfigError;
using geometry::PotentialSpec;
using geometry::SurfaceSpec;

std::string format(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

const std::set<std::string> kKnownKeys = {
    "surface.genus", "surface.tau_re", "surface.tau_im", "potential.family", "potential.degree",
    "potential.amplitude", "sweep.n_min", "sweep.n_max", "sweep.n_step", "sweep.mode",
    "grid.resolution", "output.path", "identities.seed"};

PotentialSpec parse_potential(const config::Document& doc, int genus) {
  const std::string family = doc.get_string("potential.family", std::string("zero"));
  if (family == "zero") return PotentialSpec::zero();
  if (family == "sphere_zonal") {
    if (genus != 0) throw ConfigError("potential.family sphere_zonal needs surface.genus = 0");
    const long long p = doc.get_int("potential.degree");
    if (p < 0 || p > 64) throw ConfigError("potential.degree must be in [0, 64]");
    return PotentialSpec::sphere_zonal(static_cast<int>(p), doc.get_double("potential.amplitude"));
  }
  if (family == "torus_fourier") {
    if (genus != 1) throw ConfigError("potential.family torus_fourier needs surface.genus = 1");
    static const std::regex mode_key(R"(c_(-?\d+)_(-?\d+)(_im)?)");
    PotentialSpec::ModeMap modes;
    for (const std::string& key : doc.keys_in("potential")) {
      std::smatch m;
      if (key == "family") continue;
      if (!std::regex_match(key, m, mode_key)) throw ConfigError("unknown key 'potential." + key + "'");
      const std::pair<int, int> mn{std::stoi(m[1]), std::stoi(m[2])};
      const double x = doc.get_double("potential." + key);
      cplx& c = modes[mn];
      if (m[3].matched)
        c.imag(x);
      else
        c.real(x);
    }
    if (modes.empty()) throw ConfigError("torus_fourier potential needs at least one c_<m>_<n> entry");
    // Complete the conjugate partners that were not given.
    PotentialSpec::ModeMap full = modes;
    for (const auto& [mn, c] : modes) {
      const std::pair<int, int> neg{-mn.first, -mn.second};
      if (!modes.count(neg)) full[neg] = std::conj(c);
    }
    try {
      return PotentialSpec::torus_fourier(full);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("potential: ") + e.what());
    }
  }
  throw ConfigError("unknown potential.family '" + family + "'");
}

// Admissibility diagnostic, empty when admissible.
std::string admissibility_problem(const PotentialSpec& v, const geometry::GridPtr& grid) {
  const double m = geometry::min_equilibrium_density(v, grid);
  if (m > 1e-6) return {};
  return format("admissibility violated: min f_V = %.6g (must exceed 1e-06)", m);
}

std::string identity_line(const identities::IdentityResult& r) {
  return format("%-48s %12.3e %12.3e  %s", r.name.c_str(), r.deviation, r.tolerance, r.pass() ? "PASS" : "FAIL");
}

}  // namespace

SurfaceSpec RunConfig::surface() const {
  if (genus == 0) return SurfaceSpec::sphere();
  return SurfaceSpec::torus(cplx(tau_re, tau_im));
}

std::vector<int> RunConfig::n_values() const {
  std::vector<int> out;
  if (sweep == Sweep::doubling) {
    for (long n = n_min; n <= n_max; n *= 2) out.push_back(static_cast<int>(n));
  } else {
    for (int n = n_min; n <= n_max; n += n_step) out.push_back(n);
  }
  return out;
}

double RunConfig::tolerance(const std::string& name, double fallback) const {
  auto it = tolerances.find(name);
  return it == tolerances.end() ? fallback : it->second;
}

RunConfig parse_run_config(const config::Document& doc) {
  for (const auto& [key, value] : doc.values()) {
    if (kKnownKeys.count(key)) continue;
    if (key.rfind("tolerances.", 0) == 0 || key.rfind("potential.", 0) == 0) continue;
    throw ConfigError("unknown key '" + key + "'");
  }
  RunConfig cfg;
  const long long g = doc.get_int("surface.genus", 0LL);
  if (g != 0 && g != 1) throw ConfigError("surface.genus must be 0 or 1");
  cfg.genus = static_cast<int>(g);
  cfg.tau_re = doc.get_double("surface.tau_re", 0.0);
  cfg.tau_im = doc.get_double("surface.tau_im", 1.0);
  if (cfg.genus == 1 && !(cfg.tau_im > 0.0 && std::isfinite(cfg.tau_im) && std::isfinite(cfg.tau_re)))
    throw ConfigError("surface.tau_im must be positive and finite");
  cfg.potential = parse_potential(doc, cfg.genus);

  const long long n_min = doc.get_int("sweep.n_min", 2LL);
  const long long n_max = doc.get_int("sweep.n_max", 100LL);
  const long long n_step = doc.get_int("sweep.n_step", 1LL);
  if (n_min < 2) throw ConfigError("sweep.n_min must be >= 2");
  if (n_max > 2000) throw ConfigError("sweep.n_max must be <= 2000");
  if (n_max < n_min) throw ConfigError("sweep.n_max must be >= sweep.n_min");
  if (n_step < 1) throw ConfigError("sweep.n_step must be >= 1");
  cfg.n_min = static_cast<int>(n_min);
  cfg.n_max = static_cast<int>(n_max);
  cfg.n_step = static_cast<int>(n_step);
  const std::string mode = doc.get_string("sweep.mode", std::string("linear"));
  if (mode == "linear")
    cfg.sweep = RunConfig::Sweep::linear;
  else if (mode == "doubling")
    cfg.sweep = RunConfig::Sweep::doubling;
  else
    throw ConfigError("sweep.mode must be 'linear' or 'doubling'");

  const long long res = doc.get_int("grid.resolution", 64LL);
  if (res < 16 || res > 512) throw ConfigError("grid.resolution must be in [16, 512]");
  cfg.grid_resolution = static_cast<int>(res);

  for (const std::string& key : doc.keys_in("tolerances")) {
    const double t = doc.get_double("tolerances." + key);
    if (!(t >= 0.0)) throw ConfigError("tolerances." + key + " must be non-negative");
    cfg.tolerances[key] = t;
  }
  cfg.output_path = doc.get_string("output.path", std::string());
  const long long seed = doc.get_int("identities.seed", 20240611LL);
  if (seed < 0) throw ConfigError("identities.seed must be non-negative");
  cfg.seed = static_cast<std::uint64_t>(seed);
  return cfg;
}

RunConfig load_run_config(const std::string& path) { return parse_run_config(config::Document::load(path)); }

ResidualRow make_row(int n, double exact, double asymptotic) {
  ResidualRow r{n, exact, asymptotic, std::abs(exact - asymptotic), 0.0};
  r.scaled_residual = n > 1 ? r.residual * n / std::log(static_cast<double>(n)) : r.residual;
  return r;
}

void write_residual_csv(std::ostream& out, const std::vector<ResidualRow>& rows) {
  out << "n,exact,asymptotic,residual,scaled_residual\n";
  for (const auto& r : rows)
    out << format("%d,%.17g,%.17g,%.17g,%.17g\n", r.n, r.exact, r.asymptotic, r.residual, r.scaled_residual);
}

std::vector<ResidualRow> read_residual_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "n,exact,asymptotic,residual,scaled_residual")
    throw DomainError("residual CSV: bad header");
  std::vector<ResidualRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell[5];
    for (int i = 0; i < 5; ++i)
      if (!std::getline(ls, cell[i], ',')) throw DomainError("residual CSV: short row '" + line + "'");
    ResidualRow r;
    r.n = std::stoi(cell[0]);
    r.exact = std::strtod(cell[1].c_str(), nullptr);
    r.asymptotic = std::strtod(cell[2].c_str(), nullptr);
    r.residual = std::strtod(cell[3].c_str(), nullptr);
    r.scaled_residual = std::strtod(cell[4].c_str(), nullptr);
    rows.push_back(r);
  }
  return rows;
}

int worker_count() {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("COULOMB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<int>(std::min<long>(v, 256));
  }
  return static_cast<int>(hw);
}

void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
  const size_t workers = std::min<size_t>(static_cast<size_t>(worker_count()), n);
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

CommandResult cmd_verify_sphere(const RunConfig& cfg) {
  CommandResult res;
  if (cfg.genus != 0) throw ConfigError("verify-sphere needs surface.genus = 0");
  const SurfaceSpec s = cfg.surface();
  const auto grid = geometry::make_grid(s, cfg.grid_resolution);
  if (auto problem = admissibility_problem(cfg.potential, grid); !problem.empty()) {
    res.exit_code = kVerificationFailed;
    res.report = problem + "\n";
    return res;
  }
  const bool zero = cfg.potential.family() == PotentialSpec::Family::zero;
  if (!zero && (cfg.n_max > 40 || cfg.grid_resolution < 4 * cfg.n_max))
    throw ConfigError("verify-sphere with a potential uses Gram determinants: needs n_max <= 40 and resolution >= 4 n_max");

  const auto coeffs = expansion::coeffs_plain(s, cfg.potential, grid);
  auto exact = [&](int n) {
    return zero ? exactpf::ln_z_sphere_exact(n) : exactpf::ln_z_sphere_gram(n, cfg.potential, grid).value;
  };
  auto row = [&](int n) { return make_row(n, exact(n), expansion::eval_expansion(coeffs, n)); };

  const std::vector<int> ns = cfg.n_values();
  res.rows.resize(ns.size());
  parallel_for(ns.size(), [&](size_t i) { res.rows[i] = row(ns[i]); });

  const double bound = cfg.tolerance("scaled_residual", 1.0);
  std::ostringstream rep;
  rep << format("verify-sphere: %zu values of N in [%d, %d], resolution %d\n", ns.size(), cfg.n_min, cfg.n_max,
                cfg.grid_resolution);
  rep << format("coefficients (in N, plain): quad %.12g, nlogn %.12g, linear %.12g, logn %.12g, constant %.12g\n",
                coeffs.quad, coeffs.nlogn, coeffs.linear, coeffs.logn, coeffs.constant);
  bool ok = true;
  double worst = 0.0;
  for (const auto& r : res.rows) worst = std::max(worst, r.scaled_residual);
  if (!(worst <= bound)) ok = false;
  rep << format("max scaled residual %.6e (bound %.3e) %s\n", worst, bound, worst <= bound ? "PASS" : "FAIL");

  std::vector<int> dbl;
  for (int n = cfg.n_max; n >= 2 && dbl.size() < 3; n /= 2) dbl.insert(dbl.begin(), n);
  if (dbl.size() == 3) {
    double prev = INFINITY;
    bool mono = true;
    for (int n : dbl) {
      auto it = std::find_if(res.rows.begin(), res.rows.end(), [&](const ResidualRow& r) { return r.n == n; });
      const ResidualRow r = it != res.rows.end() ? *it : row(n);
      rep << format("doubling N=%d scaled residual %.6e\n", n, r.scaled_residual);
      if (!(r.scaled_residual <= prev)) mono = false;
      prev = r.scaled_residual;
    }
    rep << format("scaled residual non-increasing over the last three doublings: %s\n", mono ? "PASS" : "FAIL");
    ok = ok && mono;
  }
  res.exit_code = ok ? kPass : kVerificationFailed;
  res.report = rep.str();
  return res;
}

CommandResult cmd_verify_torus(const RunConfig& cfg) {
  CommandResult res;
  if (cfg.genus != 1) throw ConfigError("verify-torus needs surface.genus = 1");
  if (cfg.potential.family() != PotentialSpec::Family::zero)
    throw ConfigError("verify-torus compares against the exact formula, which needs potential.family = zero");
  const SurfaceSpec s = cfg.surface();
  const auto grid = geometry::make_grid(s, cfg.grid_resolution);
  const auto mod = expansion::coeffs_modified(s, cfg.potential, grid);
  const auto plain = expansion::coeffs_plain(s, cfg.potential, grid);
  const auto pm = specfun::PeriodMatrix::genus1(s.tau());

  const std::vector<int> ns = cfg.n_values();
  res.rows.resize(ns.size());
  std::vector<double> plain_dev(ns.size());
  parallel_for(ns.size(), [&](size_t i) {
    const int n = ns[i];
    const double exact = exactpf::ln_z_theta_torus_exact(n, s.modulus());
    res.rows[i] = make_row(n, exact, expansion::eval_expansion(mod, n));
    plain_dev[i] = std::abs(exactpf::partition_from_modified(exact, 1, pm) - expansion::eval_expansion(plain, n));
  });

  const double tol = cfg.tolerance("residual", 1e-10);
  const double tol_plain = cfg.tolerance("plain_residual", 1e-10);
  double worst = 0.0;
  for (const auto& r : res.rows) worst = std::max(worst, r.residual);
  const double worst_plain = *std::max_element(plain_dev.begin(), plain_dev.end());
  std::ostringstream rep;
  rep << format("verify-torus: tau = %.6g%+.6gi, %zu values of N in [%d, %d]\n", cfg.tau_re, cfg.tau_im, ns.size(),
                cfg.n_min, cfg.n_max);
  rep << format("max residual (theta-weighted) %.3e (tolerance %.3e) %s\n", worst, tol,
                worst <= tol ? "PASS" : "FAIL");
  rep << format("max residual (plain, with theta-average shift) %.3e (tolerance %.3e) %s\n", worst_plain, tol_plain,
                worst_plain <= tol_plain ? "PASS" : "FAIL");
  res.exit_code = (worst <= tol && worst_plain <= tol_plain) ? kPass : kVerificationFailed;
  res.report = rep.str();
  return res;
}

CommandResult cmd_identities(const RunConfig& cfg, const std::optional<std::string>& only) {
  CommandResult res;
  identities::SuiteOptions opts;
  opts.seed = cfg.seed;
  opts.tolerances = cfg.tolerances;
  std::vector<std::string> names;
  for (const auto& s : identities::suites())
    if (!only || s.name == *only) names.push_back(s.name);
  if (names.empty()) throw ConfigError("unknown suite '" + *only + "'");

  std::vector<std::vector<identities::IdentityResult>> results(names.size());
  parallel_for(names.size(), [&](size_t i) { results[i] = identities::run_suite(names[i], opts); });

  std::ostringstream rep;
  rep << format("# seed %llu\n", static_cast<unsigned long long>(cfg.seed));
  rep << format("%-48s %12s %12s  %s\n", "identity", "deviation", "tolerance", "status");
  size_t failed = 0, total = 0;
  for (const auto& suite : results) {
    for (const auto& r : suite) {
      rep << identity_line(r) << "\n";
      ++total;
      if (!r.pass()) ++failed;
    }
  }
  rep << format("%zu identities, %zu failed\n", total, failed);
  res.exit_code = failed ? kVerificationFailed : kPass;
  res.report = rep.str();
  return res;
}

CommandResult cmd_fit_b2(const RunConfig& cfg) {
  CommandResult res;
  if (cfg.genus != 0) throw ConfigError("fit-b2 needs surface.genus = 0");
  if (cfg.n_max > 40) throw ConfigError("fit-b2 needs sweep.n_max <= 40 (Gram conditioning)");
  if (cfg.grid_resolution < 4 * cfg.n_max) throw ConfigError("fit-b2 needs grid.resolution >= 4 n_max");
  const std::vector<int> ns = cfg.n_values();
  if (ns.size() < 3) throw ConfigError("fit-b2 needs at least three values of N");
  const SurfaceSpec s = cfg.surface();
  const auto grid = geometry::make_grid(s, cfg.grid_resolution);
  if (auto problem = admissibility_problem(cfg.potential, grid); !problem.empty()) {
    res.exit_code = kVerificationFailed;
    res.report = problem + "\n";
    return res;
  }

  std::vector<double> diff(ns.size());
  parallel_for(ns.size(), [&](size_t i) {
    const double with_v = exactpf::ln_z_sphere_gram(ns[i], cfg.potential, grid).value;
    const double without = exactpf::ln_z_sphere_gram(ns[i], PotentialSpec::zero(), grid).value;
    diff[i] = with_v - without;
  });

  Eigen::MatrixXd a(static_cast<Eigen::Index>(ns.size()), 3);
  Eigen::VectorXd b(static_cast<Eigen::Index>(ns.size()));
  for (size_t i = 0; i < ns.size(); ++i) {
    const double n = ns[i];
    a.row(static_cast<Eigen::Index>(i)) << n * n, n, 1.0;
    b(static_cast<Eigen::Index>(i)) = diff[i];
  }
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
  for (size_t i = 0; i < ns.size(); ++i) {
    const double n = ns[i];
    res.rows.push_back(make_row(ns[i], diff[i], c(0) * n * n + c(1) * n + c(2)));
  }

  const auto pot = expansion::potential_inputs(cfg.potential, grid);
  const functionals::Metric ar = functionals::Metric::arakelov(grid);
  const double literal =
      functionals::s2(geometry::sample(cfg.potential, grid), ar, functionals::admissible_field(ar));

  std::ostringstream rep;
  rep << format("fit-b2: %zu values of N in [%d, %d], resolution %d\n", ns.size(), cfg.n_min, cfg.n_max,
                cfg.grid_resolution);
  rep << format("fitted: quad %.10e, linear %.10e, constant %.10e\n", c(0), c(1), c(2));
  rep << format("quadrature B2 = -S2(-V, rho_Ar, h) = %.10e\n", pot.quad);
  rep << format("diagnostic: S2(+V, rho_Ar, h) = %.10e\n", literal);
  bool ok;
  if (cfg.potential.family() == PotentialSpec::Family::zero || pot.quad == 0.0) {
    const double tol = cfg.tolerance("fit_b2_zero", 1e-10);
    ok = std::abs(c(0)) <= tol;
    rep << format("zero potential: |fitted quad| %.3e (tolerance %.3e) %s\n", std::abs(c(0)), tol, ok ? "PASS" : "FAIL");
  } else {
    const double tol = cfg.tolerance("fit_b2", 5e-2);
    const double rel = std::abs(c(0) - pot.quad) / std::abs(pot.quad);
    ok = rel <= tol;
    rep << format("relative deviation %.4e (tolerance %.3e) %s\n", rel, tol, ok ? "PASS" : "FAIL");
  }
  res.exit_code = ok ? kPass : kVerificationFailed;
  res.report = rep.str();
  return res;
}

int run_command(const std::string& command, const std::string& config_path, const std::optional<std::string>& only,
                const std::optional<std::string>& out_path, std::ostream& report) {
  try {
    const RunConfig cfg = load_run_config(config_path);
    CommandResult res;
    if (command == "verify-sphere")
      res = cmd_verify_sphere(cfg);
    else if (command == "verify-torus")
      res = cmd_verify_torus(cfg);
    else if (command == "identities")
      res = cmd_identities(cfg, only);
    else if (command == "fit-b2")
      res = cmd_fit_b2(cfg);
    else
      throw ConfigError("unknown command '" + command + "'");
    report << res.report;
    const std::string path = out_path ? *out_path : cfg.output_path;
    if (!path.empty() && !res.rows.empty()) {
      std::ofstream out(path);
      if (!out) throw ConfigError("cannot write '" + path + "'");
      write_residual_csv(out, res.rows);
      report << "wrote " << res.rows.size() << " rows to " << path << "\n";
    }
    return res.exit_code;
  } catch (const ConfigError& e) {
    report << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ConditioningError& e) {
    report << "conditioning error: " << e.what() << "\n";
    return kConditioningError;
  } catch (const DomainError& e) {
    report << "invalid input: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace coulomb::harness
