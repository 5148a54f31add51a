#include <cmath>
#include <complex>
#include <cstdlib>
#include <numeric>

#include "persistq/dirac.hpp"
#include "persistq/errors.hpp"
#include "persistq/gauge.hpp"
#include "persistq/io.hpp"
#include "persistq/maxwell.hpp"
#include "persistq/nelson.hpp"
#include "persistq/stochastic.hpp"
#include "runners.hpp"

namespace persistq::cli {

namespace {

constexpr double kPi = 3.14159265358979323846;
using json = nlohmann::json;
using persistq::cplx;

struct Check {
  std::string name;
  double value;
  double tolerance;
  bool pass;
};

class Suite {
 public:
  void add(const std::string& name, double value, double tolerance) {
    checks_.push_back({name, value, tolerance, value <= tolerance});
  }
  void add_flag(const std::string& name, bool ok) {
    checks_.push_back({name, ok ? 0.0 : 1.0, 0.5, ok});
  }
  bool all_pass() const {
    for (const auto& c : checks_)
      if (!c.pass) return false;
    return true;
  }
  json report() const {
    json out = json::array();
    for (const auto& c : checks_)
      out.push_back({{"check", c.name},
                     {"value", c.value},
                     {"tolerance", c.tolerance},
                     {"pass", c.pass}});
    return out;
  }

 private:
  std::vector<Check> checks_;
};

dirac::WeylSpinorField1D smooth_state(const Grid1D& grid, int variant) {
  dirac::WeylSpinorField1D f{grid, std::vector<cplx>(grid.n), std::vector<cplx>(grid.n)};
  const double L = grid.length();
  for (int j = 0; j < grid.n; ++j) {
    const double x = grid.x(j);
    f.plus[j] = std::exp(cplx(0.0, 2.0 * kPi * x / L)) + 0.3 * variant;
    f.minus[j] = 0.5 * std::exp(cplx(0.0, -4.0 * kPi * x / L)) + cplx(0.0, 0.1 * variant);
  }
  const double w = 1.0 / std::sqrt(f.norm());
  for (auto& z : f.plus) z *= w;
  for (auto& z : f.minus) z *= w;
  return f;
}

void check_kac_master(Suite& suite, std::uint64_t seed, bool fast) {
  const std::size_t n_paths = fast ? 200000 : 1000000;
  stochastic::KacParams params{1.0, 1.0, "a"};
  const int cells = fast ? 1024 : 4096;
  auto grid = Grid1D::periodic(cells, 8.0, -4.0);
  auto master = evolve_master(stochastic::SectorProb1D::delta(grid, cells / 2, +1), params,
                              grid.dx / params.c, std::lround(2.0 / (grid.dx / params.c)));
  auto ensemble = stochastic::sample_kac_paths(params, +1, 0.0, 2.0, n_paths, seed);
  auto hist = stochastic::histogram_paths(ensemble, grid);
  const int factor = cells / 32;
  const double l1 = stochastic::l1_distance(stochastic::coarsen_masses(master, factor),
                                            stochastic::coarsen_masses(hist, factor));
  suite.add("kac-master-l1", l1, 5.0 / std::sqrt(static_cast<double>(n_paths)));

  double mean = 0.0;
  for (const auto& st : ensemble.states) mean += st.x;
  mean /= static_cast<double>(n_paths);
  double var = 0.0;
  for (const auto& st : ensemble.states) var += (st.x - mean) * (st.x - mean);
  const double se = std::sqrt(var / (n_paths - 1.0) / n_paths);
  const double oracle = stochastic::kac_moments(params, +1, 2.0).mean_x;
  suite.add("kac-moment-mean", std::abs(mean - oracle), 3.0 * se);
}

void check_master_conservation(Suite& suite) {
  auto grid = Grid1D::periodic(512, 8.0, -4.0);
  stochastic::SectorProb1D f{grid, std::vector<double>(grid.n), std::vector<double>(grid.n)};
  for (int j = 0; j < grid.n; ++j) {
    const double x = grid.x(j);
    f.p_plus[j] = std::exp(-x * x);
    f.p_minus[j] = 0.5 * std::exp(-2.0 * x * x);
  }
  stochastic::KacParams params{1.0, 1.0, "a"};
  const double m0 = f.total_mass();
  auto g = evolve_master(std::move(f), params, grid.dx, 10000);
  suite.add("master-mass-conservation", std::abs(g.total_mass() - m0) / m0, 1e-12);
}

void check_telegrapher(Suite& suite) {
  stochastic::KacParams params{1.0, 2.0, "a"};
  auto grid = Grid1D::periodic(1024, 2.0 * kPi, 0.0);
  const double k = 1.0;
  const double mu = -params.lambda + std::sqrt(params.lambda * params.lambda - k * k);
  stochastic::TelegrapherState st{std::vector<double>(grid.n), std::vector<double>(grid.n)};
  for (int j = 0; j < grid.n; ++j) {
    st.p[j] = std::cos(k * grid.x(j));
    st.p_dot[j] = mu * st.p[j];
  }
  const double dt = 0.5 * grid.dx;
  auto amp = [&](const stochastic::TelegrapherState& s) {
    double re = 0.0, im = 0.0;
    for (int j = 0; j < grid.n; ++j) {
      re += s.p[j] * std::cos(k * grid.x(j));
      im += s.p[j] * std::sin(k * grid.x(j));
    }
    return std::hypot(re, im) * 2.0 / grid.n;
  };
  const long n1 = std::lround(2.0 / dt), n2 = std::lround(4.0 / dt);
  auto s1 = evolve_telegrapher(st, params, grid, dt, n1);
  const double a1 = amp(s1);
  auto s2 = evolve_telegrapher(s1, params, grid, dt, n2 - n1);
  const double rate = std::log(a1 / amp(s2)) / (dt * (n2 - n1));
  suite.add("telegrapher-dispersion", std::abs(-rate - mu) / std::abs(mu), 1e-3);
}

void check_diffusion(Suite& suite, std::uint64_t seed, bool fast) {
  const std::size_t n = fast ? 30000 : 100000;
  suite.add("diffusion-limit-ks", stochastic::diffusion_limit_check(0.5, 100.0, 1.0, n, seed),
            0.01);
}

void check_dirac_norms(Suite& suite, bool fast) {
  {
    auto grid = Grid1D::periodic(256, 16.0, -8.0);
    auto f = smooth_state(grid, 1);
    dirac::DiracParams p{1.0, 1.0, 1.0, dirac::SignConvention::sec5};
    const long steps = fast ? 2000 : 10000;
    auto g = evolve_dirac_1d(std::move(f), p, 0.01, steps);
    suite.add("dirac1d-norm-drift", std::abs(g.norm() - 1.0), 1e-10);
  }
  {
    const int n = fast ? 12 : 32;
    auto grid = Grid3D::periodic({n, n, n}, {2.0 * kPi, 2.0 * kPi, 2.0 * kPi});
    dirac::DiracSpinorField3D f{grid, std::vector<cplx>(grid.size()),
                                std::vector<cplx>(grid.size()), std::vector<cplx>(grid.size()),
                                std::vector<cplx>(grid.size())};
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l, ++idx) {
          f.l0[idx] = std::exp(cplx(0.0, 2.0 * kPi * i / n));
          f.l1[idx] = 0.4 * std::cos(2.0 * kPi * j / n);
          f.r0[idx] = cplx(0.2, 0.5) * std::sin(2.0 * kPi * l / n);
          f.r1[idx] = 0.3;
        }
    dirac::DiracParams p{1.0, 1.0, 1.0, dirac::SignConvention::sec5};
    const double n0 = f.norm();
    const long steps = fast ? 300 : 1000;
    auto g = evolve_dirac_3d(std::move(f), p, 0.03, steps);
    suite.add("dirac3d-norm-drift", std::abs(g.norm() - n0) / n0, 1e-10);
  }
}

void check_dirac_dispersion(Suite& suite, bool fast) {
  double worst = 0.0;
  const std::vector<double> ks = fast ? std::vector<double>{1.0, 2.0} : std::vector<double>{1.0, 2.0, 4.0};
  const std::vector<double> ms = fast ? std::vector<double>{0.5, 1.0} : std::vector<double>{0.0, 0.5, 1.0};
  for (double m : ms) {
    for (double k : ks) {
      dirac::DiracParams p{m, 1.0, 1.0, dirac::SignConvention::sec5};
      const double e = dirac::dirac_dispersion(k, p);
      const int n = 64;
      auto grid = Grid1D::periodic(n, 2.0 * kPi, 0.0);
      dirac::WeylSpinorField1D f{grid, std::vector<cplx>(n), std::vector<cplx>(n)};
      double wp = 1.0, wm = 0.0;
      if (m > 0.0) {
        wp = p.mass_sign() * m;
        wm = e - k;
        const double nn = std::hypot(wp, wm);
        wp /= nn;
        wm /= nn;
      }
      for (int j = 0; j < n; ++j) {
        const cplx ph = std::exp(cplx(0.0, k * grid.x(j)));
        f.plus[j] = wp * ph;
        f.minus[j] = wm * ph;
      }
      const double dt = 0.01 / e;
      const long record = std::max(1L, std::lround(0.4 / (e * dt)));
      const long steps = std::lround(64.0 * 2.0 * kPi / e / dt);
      std::vector<cplx> series;
      series.push_back(std::abs(f.plus[5]) > 0.3 ? f.plus[5] : f.minus[5]);
      for (long s = 0; s < steps; s += record) {
        f = evolve_dirac_1d(std::move(f), p, dt, record);
        series.push_back(std::abs(f.plus[5]) > 0.3 ? f.plus[5] : f.minus[5]);
      }
      const double measured = dirac::measure_mode_frequency(series, record * dt);
      worst = std::max(worst, std::abs(measured - e) / e);
    }
  }
  suite.add("dirac-dispersion-sweep", worst, 1e-4);

  // Rest-frame sector oscillation at 2 m c^2 / hbar.
  auto grid = Grid1D::periodic(16, 4.0, 0.0);
  dirac::WeylSpinorField1D f{grid, std::vector<cplx>(16, 1.0), std::vector<cplx>(16, 0.0)};
  dirac::DiracParams p{1.0, 1.0, 1.0, dirac::SignConvention::sec5};
  std::vector<double> pops{1.0};
  const double dt = 0.02;
  for (long s = 0; s < 10000; ++s) {
    f = evolve_dirac_1d(std::move(f), p, dt, 1);
    pops.push_back(std::norm(f.plus[0]));
  }
  const double measured = dirac::measure_mode_frequency(pops, dt);
  suite.add("dirac-rest-oscillation", std::abs(measured - 2.0) / 2.0, 1e-4);
}

void check_gauge(Suite& suite, bool fast) {
  auto grid = Grid1D::periodic(256, 8.0, 0.0);
  dirac::DiracParams p{1.0, 1.0, 1.0, dirac::SignConvention::sec5};
  const long steps = fast ? 300 : 1000;
  const int n_chi = fast ? 2 : 5;
  double worst = 0.0;
  for (int variant = 1; variant <= n_chi; ++variant) {
    auto f0 = smooth_state(grid, variant);
    gauge::GaugeFunction chi{grid, std::vector<double>(grid.n), {}};
    for (int j = 0; j < grid.n; ++j)
      for (int mode = 1; mode <= 3; ++mode)
        chi.chi[j] +=
            0.4 / mode * std::cos(2.0 * kPi * mode * grid.x(j) / grid.length() + 0.9 * variant);
    auto gauged =
        evolve_dirac_1d(gauge::gauge_transform(f0, 1.0, chi), p, gauge::pure_gauge_field(chi),
                        1.0, 0.005, steps);
    auto free = evolve_dirac_1d(f0, p, 0.005, steps);
    for (int j = 0; j < grid.n; ++j) {
      worst = std::max(worst,
                       std::abs(std::norm(gauged.plus[j]) - std::norm(free.plus[j])));
      worst = std::max(worst,
                       std::abs(std::norm(gauged.minus[j]) - std::norm(free.minus[j])));
    }
  }
  suite.add("gauge-invariance", worst, 1e-9);

  // Charge conjugation: sigma3-conjugate data across opposite charges.
  auto field = gauge::GaugeField1D::zero(grid);
  for (int j = 0; j < grid.n; ++j) {
    field.a0[j] = 0.3 * std::cos(2.0 * kPi * grid.x(j) / grid.length());
    field.ax[j] = 0.1 + 0.2 * std::sin(4.0 * kPi * grid.x(j) / grid.length());
  }
  auto f0 = smooth_state(grid, 3);
  auto c0 = f0;
  for (int j = 0; j < grid.n; ++j) {
    c0.plus[j] = std::conj(f0.plus[j]);
    c0.minus[j] = -std::conj(f0.minus[j]);
  }
  auto a_run = evolve_dirac_1d(f0, p, field, +1.0, 0.005, steps);
  auto b_run = evolve_dirac_1d(c0, p, field, -1.0, 0.005, steps);
  double conj_worst = 0.0;
  for (int j = 0; j < grid.n; ++j) {
    conj_worst = std::max(conj_worst,
                          std::abs(std::norm(a_run.plus[j]) - std::norm(b_run.plus[j])));
    conj_worst = std::max(conj_worst,
                          std::abs(std::norm(a_run.minus[j]) - std::norm(b_run.minus[j])));
  }
  suite.add("gauge-charge-conjugation", conj_worst, 1e-10);
}

void check_maxwell(Suite& suite, bool fast) {
  const int n = fast ? 16 : 64;
  auto grid = Grid3D::periodic({n, n, n}, {2.0 * kPi, 2.0 * kPi, 2.0 * kPi});
  maxwell::Vec3Field fp, fm;
  for (int c = 0; c < 3; ++c) {
    fp[c].assign(grid.size(), 0.0);
    fm[c].assign(grid.size(), 0.0);
  }
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l, ++idx) {
        const double x = i * grid.d[0], y = j * grid.d[1], z = l * grid.d[2];
        fp[0][idx] = std::cos(z) + 0.4 * std::sin(y);
        fp[1][idx] = 0.5 * std::cos(x);
        fm[2][idx] = 0.3 * std::sin(x) + 0.2 * std::cos(y);
      }
  auto field = maxwell::make_rs_field(grid, std::move(fp), std::move(fm));
  const long steps = fast ? 300 : 1000;
  const double e0 = maxwell::energy(field);
  const double h0 = maxwell::helicity(field);
  const double d0 = maxwell::divergence_residual(field);
  auto evolved = maxwell::evolve_maxwell_rs(field, 0.02, steps);
  suite.add("maxwell-energy-drift", std::abs(maxwell::energy(evolved) - e0) / e0, 1e-12);
  suite.add("maxwell-helicity-drift",
            std::abs(maxwell::helicity(evolved) - h0) / std::max(1.0, std::abs(h0)), 1e-12);
  suite.add("maxwell-divergence-constancy",
            std::abs(maxwell::divergence_residual(evolved) - d0), 1e-12);

  auto kac_path = maxwell::evolve_photon_kac(field, 0.0, 0.02, steps);
  bool bitwise = true;
  for (int c = 0; c < 3; ++c)
    for (std::size_t q = 0; q < grid.size(); ++q)
      bitwise = bitwise && kac_path.f_plus[c][q] == evolved.f_plus[c][q] &&
                kac_path.f_minus[c][q] == evolved.f_minus[c][q];
  suite.add_flag("photon-kac-zero-rate-bitwise", bitwise);

  // k = 0 helicity-difference decay rate 2 lambda_gamma.
  maxwell::Vec3Field up, um;
  for (int c = 0; c < 3; ++c) {
    up[c].assign(grid.size(), cplx(1.0, 0.2));
    um[c].assign(grid.size(), cplx(0.1, -0.3));
  }
  auto uniform = maxwell::make_rs_field(grid, std::move(up), std::move(um));
  const double lg = 0.7, dt = 0.01;
  const long ksteps = 200;
  const cplx diff0 = uniform.f_plus[0][0] - uniform.f_minus[0][0];
  auto decayed = maxwell::evolve_photon_kac(uniform, lg, dt, ksteps);
  const cplx diff1 = decayed.f_plus[0][0] - decayed.f_minus[0][0];
  const double rate = -std::log(std::abs(diff1 / diff0)) / (dt * ksteps);
  suite.add("photon-kac-decay-rate", std::abs(rate - 2.0 * lg) / (2.0 * lg), 1e-6);
}

void check_nelson(Suite& suite) {
  auto hermite = [](int nl, double x) {
    switch (nl) {
      case 0: return 1.0;
      case 1: return 2.0 * x;
      case 2: return 4.0 * x * x - 2.0;
      default: return 8.0 * x * x * x - 12.0 * x;
    }
  };
  double worst = 0.0;
  for (int level = 0; level <= 3; ++level) {
    const int points = 1024;
    nelson::StationaryState st;
    st.grid = Grid1D::open(points, -7.0, 7.0);
    st.rho.resize(points);
    st.v_potential.resize(points);
    for (int j = 0; j < points; ++j) {
      const double x = st.grid.x(j);
      const double amp = hermite(level, x) * std::exp(-0.5 * x * x);
      st.rho[j] = amp * amp;
      st.v_potential[j] = 0.5 * x * x;
    }
    st.energy = level + 0.5;
    worst = std::max(worst, nelson::stationarity_residual(st).max_abs);
  }
  {
    const int points = 1024;
    nelson::StationaryState st;
    st.grid = Grid1D::radial(points, 0.2, 12.0);
    st.rho.resize(points);
    st.v_potential.resize(points);
    for (int j = 0; j < points; ++j) {
      const double r = st.grid.x(j);
      st.rho[j] = std::exp(-2.0 * r);
      st.v_potential[j] = -1.0 / r;
    }
    st.energy = -0.5;
    worst = std::max(worst, nelson::stationarity_residual(st).max_abs);
  }
  suite.add("nelson-balance", worst, 1e-5);

  // Quantum-potential form equivalence on a deterministic smooth suite.
  auto grid = Grid1D::periodic(256, 2.0 * kPi, 0.0);
  double qworst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> rho(grid.n);
    for (int j = 0; j < grid.n; ++j) {
      double r = 0.0;
      for (int mode = 1; mode <= 4; ++mode)
        r += 0.3 / mode * std::cos(mode * grid.x(j) + 0.37 * trial * mode);
      rho[j] = std::exp(2.0 * r);
    }
    auto q1 = nelson::quantum_potential(rho, 1.0, 1.0, grid);
    std::vector<std::uint8_t> no_mask;
    auto u = nelson::osmotic_velocity(rho, 1.0, 1.0, grid, no_mask);
    auto q2 = nelson::quantum_potential_from_u(u, 1.0, 1.0, grid);
    for (int j = 0; j < grid.n; ++j) qworst = std::max(qworst, std::abs(q1[j] - q2[j]));
  }
  suite.add("nelson-q-form-equivalence", qworst, 1e-8);
}

void check_gordon(Suite& suite) {
  auto grid = Grid1D::periodic(128, 2.0 * kPi, 0.0);
  double worst = 0.0;
  int cases = 0;
  for (double k : {-4.0, -2.0, -1.0, 1.0, 3.0}) {
    for (double mass : {0.5, 1.0}) {
      dirac::DiracParams params{mass, 1.0, 1.0, dirac::SignConvention::sec5};
      const double e = dirac::dirac_dispersion(k, params);
      const double wp = params.mass_sign() * mass;
      const double wm = e - k;
      const double nn = std::hypot(wp, wm);
      dirac::WeylSpinorField1D f{grid, std::vector<cplx>(grid.n), std::vector<cplx>(grid.n)};
      for (int j = 0; j < grid.n; ++j) {
        const cplx ph = std::exp(cplx(0.0, k * grid.x(j)));
        f.plus[j] = wp / nn * ph;
        f.minus[j] = wm / nn * ph;
      }
      worst = std::max(worst, nelson::gordon_decompose(f, params).max_residual);
      ++cases;
    }
  }
  suite.add("gordon-identity-" + std::to_string(cases) + "-cases", worst, 1e-10);
}

}  // namespace

bool run_verify_all(const ResolvedParams& params, const std::string& report_path) {
  const bool fast = params.flag("fast");
  const std::uint64_t seed = params.uinteger("seed");
  const long threads = params.integer("threads");
  if (threads > 0) setenv("PERSISTQ_THREADS", std::to_string(threads).c_str(), 1);

  Suite suite;
  check_kac_master(suite, seed, fast);
  check_master_conservation(suite);
  check_telegrapher(suite);
  check_diffusion(suite, seed + 1, fast);
  check_dirac_norms(suite, fast);
  check_dirac_dispersion(suite, fast);
  check_gauge(suite, fast);
  check_maxwell(suite, fast);
  check_nelson(suite);
  check_gordon(suite);

  json report = {{"mode", fast ? "fast" : "full"},
                 {"seed", seed},
                 {"checks", suite.report()},
                 {"all_pass", suite.all_pass()}};
  io::write_json(report_path, report);
  return suite.all_pass();
}

}  // namespace persistq::cli
