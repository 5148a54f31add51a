#include "persistq/stochastic.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>

#include "doctest.h"
#include "persistq/errors.hpp"

using namespace persistq;
using namespace persistq::stochastic;

namespace {

double ensemble_mean_x(const PathEnsemble& e) {
  double s = 0.0;
  for (const auto& st : e.states) s += st.x;
  return s / static_cast<double>(e.n_paths);
}

double ensemble_std_x(const PathEnsemble& e, double mean) {
  double s = 0.0;
  for (const auto& st : e.states) s += (st.x - mean) * (st.x - mean);
  return std::sqrt(s / static_cast<double>(e.n_paths - 1));
}

}  // namespace

TEST_CASE("ballistic limit: lambda = 0 gives straight paths") {
  KacParams params{1.0, 0.0, "a"};
  auto e = sample_kac_paths(params, +1, 0.0, 3.0, 1000, 7);
  for (const auto& st : e.states) {
    CHECK(st.x == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(st.direction == +1);
  }
  for (auto c : e.switch_counts) CHECK(c == 0);
}

TEST_CASE("finite propagation speed holds exactly") {
  KacParams params{2.0, 3.0, "a"};
  auto e = sample_kac_paths(params, -1, 0.5, 1.7, 20000, 99);
  const double reach = params.c * 1.7;
  for (const auto& st : e.states) CHECK(std::abs(st.x - 0.5) <= reach);
}

TEST_CASE("ensemble mean matches the moment oracle") {
  // d<s>/dt = -2 lambda <s>, d<x>/dt = c <s>  =>  <x>(2) = (1/2)(1 - e^-4)
  KacParams params{1.0, 1.0, "a"};
  const std::size_t n = 200000;
  auto e = sample_kac_paths(params, +1, 0.0, 2.0, n, 20260501);
  const double mean = ensemble_mean_x(e);
  const double se = ensemble_std_x(e, mean) / std::sqrt(static_cast<double>(n));
  const double expected = 0.5 * (1.0 - std::exp(-4.0));
  CHECK(expected == doctest::Approx(0.4908421805556329).epsilon(1e-12));
  CHECK(std::abs(mean - expected) < 3.0 * se);
}

TEST_CASE("moment match across a (lambda, t) sweep") {
  const std::size_t n = 100000;
  int run = 0;
  for (double lambda : {0.5, 1.0, 2.0}) {
    for (double t : {0.5, 1.0, 3.0}) {
      KacParams params{1.0, lambda, "a"};
      auto e = sample_kac_paths(params, +1, 0.0, t, n, 1000 + run++);
      auto m = kac_moments(params, +1, t);
      const double mean = ensemble_mean_x(e);
      const double se = ensemble_std_x(e, mean) / std::sqrt(static_cast<double>(n));
      CHECK(std::abs(mean - m.mean_x) < 3.0 * se);
      double mean_s = 0.0;
      for (const auto& st : e.states) mean_s += st.direction;
      mean_s /= static_cast<double>(n);
      const double se_s = 1.0 / std::sqrt(static_cast<double>(n));
      CHECK(std::abs(mean_s - m.mean_s) < 3.0 * se_s);
    }
  }
}

TEST_CASE("switching equilibrates the direction distribution") {
  KacParams params{1.0, 5.0, "a"};
  const std::size_t n = 100000;
  auto e = sample_kac_paths(params, +1, 0.0, 10.0, n, 5);
  double plus = 0.0;
  for (const auto& st : e.states)
    if (st.direction == +1) plus += 1.0;
  const double frac = plus / static_cast<double>(n);
  CHECK(std::abs(frac - 0.5) < 3.0 * 0.5 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("kac_moments closed forms") {
  CHECK(kac_moments(KacParams{1.0, 0.0, "a"}, +1, 1.0).mean_x == doctest::Approx(1.0));
  // t -> infinity limit c s0 / (2 lambda)
  CHECK(kac_moments(KacParams{1.0, 1.0, "a"}, +1, 60.0).mean_x == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(kac_moments(KacParams{1.0, 1.0, "a"}, -1, 2.0).mean_x ==
        doctest::Approx(-0.5 * (1.0 - std::exp(-4.0))).epsilon(1e-14));
}

TEST_CASE("sampler is deterministic across seeds and thread counts") {
  KacParams params{1.0, 1.0, "a"};
  setenv("PERSISTQ_THREADS", "1", 1);
  auto a = sample_kac_paths(params, +1, 0.0, 2.0, 50000, 42);
  setenv("PERSISTQ_THREADS", "3", 1);
  auto b = sample_kac_paths(params, +1, 0.0, 2.0, 50000, 42);
  unsetenv("PERSISTQ_THREADS");
  auto c = sample_kac_paths(params, +1, 0.0, 2.0, 50000, 43);
  REQUIRE(a.states.size() == b.states.size());
  bool identical = true;
  for (std::size_t i = 0; i < a.states.size(); ++i)
    identical = identical && a.states[i].x == b.states[i].x &&
                a.states[i].direction == b.states[i].direction;
  CHECK(identical);
  bool differs = false;
  for (std::size_t i = 0; i < a.states.size(); ++i)
    differs = differs || a.states[i].x != c.states[i].x;
  CHECK(differs);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(sample_kac_paths(KacParams{1.0, -1.0, "a"}, +1, 0.0, 1.0, 10, 1),
                  ValidationError);
  CHECK_THROWS_AS(sample_kac_paths(KacParams{0.0, 1.0, "a"}, +1, 0.0, 1.0, 10, 1),
                  ValidationError);
  CHECK_THROWS_AS(sample_kac_paths(KacParams{1.0, 1.0, "a"}, +1, 0.0, -1.0, 10, 1),
                  ValidationError);
  CHECK_THROWS_AS(sample_kac_paths(KacParams{1.0, 1.0, "a"}, +1, 0.0, 1.0, 0, 1),
                  ValidationError);
}

TEST_CASE("master equation: pure transport at lambda = 0") {
  auto grid = Grid1D::periodic(64, 64.0, 0.0);
  auto f = SectorProb1D::delta(grid, 10, +1);
  KacParams params{1.0, 0.0, "a"};
  auto g = evolve_master(f, params, grid.dx / params.c, 5);
  for (int j = 0; j < grid.n; ++j) {
    CHECK(g.p_plus[j] == (j == 15 ? 1.0 / grid.dx : 0.0));
    CHECK(g.p_minus[j] == 0.0);
  }
}

TEST_CASE("master equation conserves total mass over 1e4 steps") {
  auto grid = Grid1D::periodic(512, 8.0, -4.0);
  SectorProb1D f{grid, std::vector<double>(grid.n), std::vector<double>(grid.n)};
  for (int j = 0; j < grid.n; ++j) {
    const double x = grid.x(j);
    f.p_plus[j] = std::exp(-x * x) * 0.7;
    f.p_minus[j] = std::exp(-2.0 * (x - 1.0) * (x - 1.0)) * 0.4;
  }
  KacParams params{1.0, 1.5, "a"};
  const double m0 = f.total_mass();
  auto g = evolve_master(std::move(f), params, grid.dx / params.c, 10000);
  CHECK(std::abs(g.total_mass() - m0) <= 1e-12 * m0);
  for (int j = 0; j < grid.n; ++j) {
    CHECK(g.p_plus[j] >= 0.0);
    CHECK(g.p_minus[j] >= 0.0);
  }
}

TEST_CASE("sector mass is not separately conserved") {
  auto grid = Grid1D::periodic(128, 4.0, -2.0);
  auto f = SectorProb1D::delta(grid, 64, +1);
  KacParams params{1.0, 1.0, "a"};
  const double plus0 = std::accumulate(f.p_plus.begin(), f.p_plus.end(), 0.0) * grid.dx;
  const double total0 = f.total_mass();
  auto g = evolve_master(std::move(f), params, grid.dx / params.c, 1);
  const double plus1 = std::accumulate(g.p_plus.begin(), g.p_plus.end(), 0.0) * grid.dx;
  CHECK(plus1 < plus0);
  CHECK(g.total_mass() == doctest::Approx(total0).epsilon(1e-14));
}

TEST_CASE("master rejects off-CFL steps and bad inputs") {
  auto grid = Grid1D::periodic(64, 8.0, -4.0);
  auto f = SectorProb1D::delta(grid, 32, +1);
  KacParams params{2.0, 1.0, "a"};
  CHECK_THROWS_AS(evolve_master(f, params, grid.dx, 1), ValidationError);
  CHECK_NOTHROW(evolve_master(f, params, grid.dx / params.c, 1));
  auto bad = f;
  bad.p_plus[0] = -1.0;
  CHECK_THROWS_AS(evolve_master(bad, params, grid.dx / params.c, 1), ValidationError);
}

TEST_CASE("Monte Carlo histogram matches the master solution (L1 oracle)") {
  // Coarse blocks keep sampling noise low; the fine master lattice keeps the
  // lattice-vs-continuum gap well below the tolerance.
  const std::size_t n_paths = 100000;
  KacParams params{1.0, 1.0, "a"};
  auto grid = Grid1D::periodic(1024, 8.0, -4.0);
  auto master0 = SectorProb1D::delta(grid, 512, +1);
  auto master = evolve_master(master0, params, grid.dx / params.c, 256);  // t = 2

  auto ensemble = sample_kac_paths(params, +1, 0.0, 2.0, n_paths, 314159);
  auto hist = histogram_paths(ensemble, grid);

  const auto a = coarsen_masses(master, 32);
  const auto b = coarsen_masses(hist, 32);
  const double l1 = l1_distance(a, b);
  CHECK(l1 <= 5.0 / std::sqrt(static_cast<double>(n_paths)));
}

TEST_CASE("telegrapher: lambda = 0 wave translation converges at second order") {
  KacParams params{1.0, 0.0, "a"};
  auto run = [&](int n) {
    auto grid = Grid1D::periodic(n, 16.0, -8.0);
    TelegrapherState st;
    st.p.resize(n);
    st.p_dot.resize(n);
    for (int j = 0; j < n; ++j) {
      const double x = grid.x(j);
      st.p[j] = std::exp(-2.0 * x * x);
      st.p_dot[j] = 4.0 * x * std::exp(-2.0 * x * x);  // -c d/dx p for a right-mover
    }
    const double dt = 0.5 * grid.dx / params.c;
    const long steps = std::lround(2.0 / dt);
    auto out = evolve_telegrapher(st, params, grid, dt, steps);
    double err = 0.0;
    for (int j = 0; j < n; ++j) {
      const double x = grid.x(j) - params.c * (steps * dt);
      err = std::max(err, std::abs(out.p[j] - std::exp(-2.0 * x * x)));
    }
    return err;
  };
  const double e1 = run(256);
  const double e2 = run(512);
  CHECK(e1 < 2e-2);
  CHECK(e1 / e2 > 3.0);  // O(dx^2)
}

TEST_CASE("telegrapher single-mode decay matches the dispersion root") {
  // mu+ = -lambda + sqrt(lambda^2 - c^2 k^2) for the slow mode.
  KacParams params{1.0, 2.0, "a"};
  const int n = 512;
  const double length = 2.0 * 3.14159265358979323846;
  auto grid = Grid1D::periodic(n, length, 0.0);
  const double k = 1.0;
  const double mu = -params.lambda + std::sqrt(params.lambda * params.lambda - k * k);
  TelegrapherState st;
  st.p.resize(n);
  st.p_dot.resize(n);
  for (int j = 0; j < n; ++j) {
    st.p[j] = std::cos(k * grid.x(j));
    st.p_dot[j] = mu * st.p[j];
  }
  const double dt = 0.5 * grid.dx;
  auto amplitude = [&](const TelegrapherState& s) {
    double re = 0.0, im = 0.0;
    for (int j = 0; j < n; ++j) {
      re += s.p[j] * std::cos(k * grid.x(j));
      im += s.p[j] * std::sin(k * grid.x(j));
    }
    return std::hypot(re, im) * 2.0 / n;
  };
  const long steps1 = std::lround(2.0 / dt);
  const long steps2 = std::lround(4.0 / dt);
  auto s1 = evolve_telegrapher(st, params, grid, dt, steps1);
  auto s2 = evolve_telegrapher(s1, params, grid, dt, steps2 - steps1);
  const double rate = std::log(amplitude(s1) / amplitude(s2)) / (dt * (steps2 - steps1));
  CHECK(std::abs(-rate - mu) <= 1e-3 * std::abs(mu));
}

TEST_CASE("master total probability satisfies the telegrapher equation") {
  KacParams params{1.0, 1.0, "a"};
  auto residual = [&](int n) {
    auto grid = Grid1D::periodic(n, 8.0, -4.0);
    SectorProb1D f{grid, std::vector<double>(grid.n), std::vector<double>(grid.n)};
    for (int j = 0; j < grid.n; ++j) {
      const double x = grid.x(j);
      f.p_plus[j] = 0.5 * std::exp(-4.0 * x * x);
      f.p_minus[j] = 0.5 * std::exp(-4.0 * x * x);
    }
    const double dt = grid.dx / params.c;
    const long base = std::lround(0.5 / dt);
    auto prev = evolve_master(f, params, dt, base);
    auto cur = evolve_master(prev, params, dt, 1);
    auto next = evolve_master(cur, params, dt, 1);
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
      auto total = [&](const SectorProb1D& s, int i) {
        const int w = (i % n + n) % n;
        return s.p_plus[w] + s.p_minus[w];
      };
      const double ptt = (total(next, j) - 2.0 * total(cur, j) + total(prev, j)) / (dt * dt);
      const double pt = (total(next, j) - total(prev, j)) / (2.0 * dt);
      const double pxx =
          (total(cur, j + 1) - 2.0 * total(cur, j) + total(cur, j - 1)) / (grid.dx * grid.dx);
      worst = std::max(worst,
                       std::abs(ptt + 2.0 * params.lambda * pt - params.c * params.c * pxx));
    }
    return worst;
  };
  const double r1 = residual(256);
  const double r2 = residual(512);
  CHECK(r1 / r2 > 3.0);  // O(dx^2)
}

TEST_CASE("diffusion limit: large lambda approaches the heat kernel") {
  CHECK(diffusion_limit_check(0.5, 100.0, 1.0, 20000, 2718) <= 0.01);
}

TEST_CASE("diffusion limit: small lambda keeps ballistic peaks") {
  CHECK(diffusion_limit_check(0.5, 0.5, 1.0, 20000, 2718) > 0.1);
}

TEST_CASE("diffusion limit: t = 0 degenerates cleanly") {
  CHECK(diffusion_limit_check(0.5, 10.0, 0.0, 1000, 1) == 0.0);
}

TEST_CASE("telegrapher rejects unstable steps") {
  KacParams params{1.0, 0.5, "a"};
  auto grid = Grid1D::periodic(64, 8.0, -4.0);
  TelegrapherState st{std::vector<double>(64, 1.0), std::vector<double>(64, 0.0)};
  CHECK_THROWS_AS(evolve_telegrapher(st, params, grid, 1.5 * grid.dx, 1), ValidationError);
}

TEST_CASE("matched telegrapher velocity from the sector split") {
  // dP/dt = -dJ/dx with J = c (p+ - p-); second-order centered differences.
  auto run = [&](int n) {
    auto grid = Grid1D::periodic(n, 8.0, -4.0);
    SectorProb1D f{grid, std::vector<double>(grid.n), std::vector<double>(grid.n)};
    for (int j = 0; j < grid.n; ++j) {
      const double x = grid.x(j);
      f.p_plus[j] = std::exp(-x * x);
      f.p_minus[j] = 0.3 * std::exp(-2.0 * x * x);
    }
    const double c = 1.7;
    auto pdot = telegrapher_pdot_from_sectors(f, c);
    double err = 0.0;
    for (int j = 0; j < grid.n; ++j) {
      const double x = grid.x(j);
      const double dj = c * (-2.0 * x * std::exp(-x * x) - 0.3 * -4.0 * x * std::exp(-2.0 * x * x));
      err = std::max(err, std::abs(pdot[j] + dj));
    }
    return err;
  };
  CHECK(run(256) < 1e-2);
  CHECK(run(256) / run(512) > 3.0);  // O(dx^2)
}
