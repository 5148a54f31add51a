#include "persistq/maxwell.hpp"

#include <cmath>
#include <cstring>

#include "doctest.h"
#include "persistq/errors.hpp"

using namespace persistq;
using namespace persistq::maxwell;

namespace {

constexpr double kPi = 3.14159265358979323846;

Grid3D small_grid() { return Grid3D::periodic({8, 8, 8}, {2.0 * kPi, 2.0 * kPi, 2.0 * kPi}); }

/// Right-circular plane wave along z: F+ = (x + i y)/sqrt(2) e^{ikz}, F- = 0.
RSField3D rcp_wave(const Grid3D& g, double k) {
  Vec3Field fp, fm;
  for (int c = 0; c < 3; ++c) {
    fp[c].assign(g.size(), 0.0);
    fm[c].assign(g.size(), 0.0);
  }
  std::size_t idx = 0;
  for (int i = 0; i < g.n[0]; ++i)
    for (int j = 0; j < g.n[1]; ++j)
      for (int l = 0; l < g.n[2]; ++l, ++idx) {
        const cplx phase = std::exp(cplx(0.0, k * l * g.d[2]));
        fp[0][idx] = phase / std::sqrt(2.0);
        fp[1][idx] = cplx(0.0, 1.0) * phase / std::sqrt(2.0);
      }
  return make_rs_field(g, std::move(fp), std::move(fm));
}

/// Real solenoidal (E, B) built from a few transverse plane waves.
void random_eb(const Grid3D& g, RealVec3Field& e, RealVec3Field& b) {
  for (int c = 0; c < 3; ++c) {
    e[c].assign(g.size(), 0.0);
    b[c].assign(g.size(), 0.0);
  }
  std::size_t idx = 0;
  for (int i = 0; i < g.n[0]; ++i)
    for (int j = 0; j < g.n[1]; ++j)
      for (int l = 0; l < g.n[2]; ++l, ++idx) {
        const double x = i * g.d[0], y = j * g.d[1], z = l * g.d[2];
        // k along z with x/y polarizations, k along x with y/z polarizations
        e[0][idx] = std::cos(z) + 0.3 * std::sin(2.0 * z + 0.4);
        e[1][idx] = 0.5 * std::cos(x + 0.2) + 0.2 * std::sin(z);
        e[2][idx] = 0.7 * std::sin(y);
        b[0][idx] = 0.4 * std::cos(y + 1.0);
        b[1][idx] = std::sin(z) - 0.2 * std::cos(x);
        b[2][idx] = 0.3 * std::sin(x + 0.5);
      }
}

}  // namespace

TEST_CASE("rs_from_eb definition and round trip") {
  auto g = small_grid();
  SUBCASE("zero fields map to the zero RS pair") {
    RealVec3Field e, b;
    for (int c = 0; c < 3; ++c) {
      e[c].assign(g.size(), 0.0);
      b[c].assign(g.size(), 0.0);
    }
    auto rs = rs_from_eb(g, e, b);
    CHECK(energy(rs) == 0.0);
    CHECK(rs.projection_residual == 0.0);
  }
  SUBCASE("B = 0 gives F+ = F- = E") {
    RealVec3Field e, b;
    random_eb(g, e, b);
    for (int c = 0; c < 3; ++c) std::fill(b[c].begin(), b[c].end(), 0.0);
    auto rs = rs_from_eb(g, e, b);
    double worst = 0.0;
    for (int c = 0; c < 3; ++c)
      for (std::size_t q = 0; q < g.size(); ++q)
        worst = std::max(worst, std::abs(rs.f_plus[c][q] - rs.f_minus[c][q]));
    CHECK(worst <= 1e-12);
  }
  SUBCASE("round trip is the identity for solenoidal input") {
    RealVec3Field e, b;
    random_eb(g, e, b);
    auto rs = rs_from_eb(g, e, b);
    CHECK(rs.projection_residual <= 1e-12);  // input built transverse
    auto back = eb_from_rs(rs);
    CHECK(back.imag_residual <= 1e-12);
    double worst = 0.0;
    for (int c = 0; c < 3; ++c)
      for (std::size_t q = 0; q < g.size(); ++q)
        worst = std::max({worst, std::abs(back.e[c][q] - e[c][q]),
                          std::abs(back.b[c][q] - b[c][q])});
    CHECK(worst <= 1e-13);
  }
  SUBCASE("F+ = F- means no magnetic field") {
    RealVec3Field e, b;
    random_eb(g, e, b);
    for (int c = 0; c < 3; ++c) std::fill(b[c].begin(), b[c].end(), 0.0);
    auto back = eb_from_rs(rs_from_eb(g, e, b));
    double worst = 0.0;
    for (int c = 0; c < 3; ++c)
      for (std::size_t q = 0; q < g.size(); ++q) worst = std::max(worst, std::abs(back.b[c][q]));
    CHECK(worst <= 1e-13);
  }
}

TEST_CASE("single-helicity plane wave has orthogonal equal-magnitude E and B") {
  auto g = small_grid();
  auto rs = rcp_wave(g, 1.0);
  auto eb = eb_from_rs(rs);
  double dot = 0.0, e2 = 0.0, b2 = 0.0;
  for (std::size_t q = 0; q < g.size(); ++q)
    for (int c = 0; c < 3; ++c) {
      dot += eb.e[c][q] * eb.b[c][q];
      e2 += eb.e[c][q] * eb.e[c][q];
      b2 += eb.b[c][q] * eb.b[c][q];
    }
  CHECK(std::abs(dot) <= 1e-12 * e2);
  CHECK(e2 == doctest::Approx(b2).epsilon(1e-12));
}

TEST_CASE("energy bookkeeping identity against E,B") {
  auto g = small_grid();
  RealVec3Field e, b;
  random_eb(g, e, b);
  auto rs = rs_from_eb(g, e, b);
  double eb2 = 0.0;
  for (int c = 0; c < 3; ++c)
    for (std::size_t q = 0; q < g.size(); ++q)
      eb2 += e[c][q] * e[c][q] + b[c][q] * b[c][q];
  eb2 *= g.cell_volume();
  CHECK(energy(rs) == doctest::Approx(eb2).epsilon(1e-12));
}

TEST_CASE("free evolution conserves energy, helicity, and transversality") {
  auto g = small_grid();
  RealVec3Field e, b;
  random_eb(g, e, b);
  auto rs = rs_from_eb(g, e, b);
  const double e0 = energy(rs);
  const double h0 = helicity(rs);
  const double d0 = divergence_residual(rs);
  auto out = evolve_maxwell_rs(rs, 0.02, 1000);
  CHECK(std::abs(energy(out) - e0) <= 1e-12 * e0);
  CHECK(std::abs(helicity(out) - h0) <= 1e-12 * std::max(1.0, std::abs(h0)));
  CHECK(std::abs(divergence_residual(out) - d0) <= 1e-12);
}

TEST_CASE("right-circular plane wave stays in its helicity and rotates at c|k|") {
  auto g = small_grid();
  const double k = 1.0;
  auto rs = rcp_wave(g, k);
  const double dt = 0.05;
  const long steps = 200;
  const cplx before = rs.f_plus[0][3];
  auto out = evolve_maxwell_rs(rs, dt, steps);
  double fm = 0.0;
  for (int c = 0; c < 3; ++c)
    for (std::size_t q = 0; q < g.size(); ++q) fm = std::max(fm, std::abs(out.f_minus[c][q]));
  CHECK(fm == 0.0);
  // omega = c|k|: phase factor e^{-i omega t} on the whole field
  const cplx ratio = out.f_plus[0][3] / before;
  CHECK(std::abs(ratio - std::exp(cplx(0.0, -k * dt * steps))) <= 1e-6);
  // shape preserved
  CHECK(std::abs(std::abs(ratio) - 1.0) <= 1e-12);
}

TEST_CASE("photon-Kac at lambda_gamma = 0 is bitwise pure Maxwell") {
  auto g = small_grid();
  RealVec3Field e, b;
  random_eb(g, e, b);
  auto rs = rs_from_eb(g, e, b);
  auto a = evolve_maxwell_rs(rs, 0.03, 200);
  auto c = evolve_photon_kac(rs, 0.0, 0.03, 200);
  for (int comp = 0; comp < 3; ++comp) {
    CHECK(std::memcmp(a.f_plus[comp].data(), c.f_plus[comp].data(),
                      sizeof(cplx) * g.size()) == 0);
    CHECK(std::memcmp(a.f_minus[comp].data(), c.f_minus[comp].data(),
                      sizeof(cplx) * g.size()) == 0);
  }
}

TEST_CASE("photon-Kac k = 0 sector: difference decays at 2 lambda, sum constant") {
  auto g = small_grid();
  Vec3Field fp, fm;
  for (int c = 0; c < 3; ++c) {
    fp[c].assign(g.size(), cplx(0.8, 0.1) * static_cast<double>(c + 1));
    fm[c].assign(g.size(), cplx(-0.2, 0.3) * static_cast<double>(c + 1));
  }
  auto rs = make_rs_field(g, std::move(fp), std::move(fm));
  const double lg = 0.7, dt = 0.01;
  const long steps = 300;
  const cplx diff0 = rs.f_plus[1][0] - rs.f_minus[1][0];
  const cplx sum0 = rs.f_plus[1][0] + rs.f_minus[1][0];
  auto out = evolve_photon_kac(rs, lg, dt, steps);
  const cplx diff1 = out.f_plus[1][0] - out.f_minus[1][0];
  const cplx sum1 = out.f_plus[1][0] + out.f_minus[1][0];
  CHECK(std::abs(sum1 - sum0) <= 1e-12 * std::abs(sum0));
  const double expected = std::exp(-2.0 * lg * dt * steps);
  CHECK(std::abs(diff1 / diff0 - expected) <= 1e-12);
  // measured decay rate
  const double rate = -std::log(std::abs(diff1 / diff0)) / (dt * steps);
  CHECK(rate == doctest::Approx(2.0 * lg).epsilon(1e-6));
}

TEST_CASE("photon-Kac helicity magnitude decays monotonically at k = 0") {
  auto g = small_grid();
  Vec3Field fp, fm;
  for (int c = 0; c < 3; ++c) {
    fp[c].assign(g.size(), cplx(1.0, 0.0));
    fm[c].assign(g.size(), cplx(0.2, 0.0));
  }
  auto rs = make_rs_field(g, std::move(fp), std::move(fm));
  double prev = std::abs(helicity(rs));
  for (int chunk = 0; chunk < 5; ++chunk) {
    rs = evolve_photon_kac(std::move(rs), 0.5, 0.02, 50);
    const double h = std::abs(helicity(rs));
    CHECK(h < prev);
    prev = h;
  }
}

TEST_CASE("helicity diagnostics on pure modes") {
  auto g = small_grid();
  auto rs = rcp_wave(g, 2.0);
  CHECK(helicity(rs) == doctest::Approx(2.0 * energy(rs)).epsilon(1e-12));
  RealVec3Field e, b;
  for (int c = 0; c < 3; ++c) {
    e[c].assign(g.size(), 0.0);
    b[c].assign(g.size(), 0.0);
  }
  auto zero = rs_from_eb(g, e, b);
  CHECK(helicity(zero) == 0.0);
  CHECK(energy(zero) == 0.0);
  CHECK(divergence_residual(zero) == 0.0);
}

TEST_CASE("longitudinal input is projected out and reported") {
  auto g = small_grid();
  Vec3Field fp, fm;
  for (int c = 0; c < 3; ++c) {
    fp[c].assign(g.size(), 0.0);
    fm[c].assign(g.size(), 0.0);
  }
  // F+ = z-hat e^{ikz}: purely longitudinal
  std::size_t idx = 0;
  for (int i = 0; i < g.n[0]; ++i)
    for (int j = 0; j < g.n[1]; ++j)
      for (int l = 0; l < g.n[2]; ++l, ++idx)
        fp[2][idx] = std::exp(cplx(0.0, l * g.d[2]));
  auto rs = make_rs_field(g, std::move(fp), std::move(fm));
  CHECK(rs.projection_residual == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(energy(rs) <= 1e-20);
}

TEST_CASE("validation") {
  auto g = small_grid();
  auto rs = rcp_wave(g, 1.0);
  CHECK_THROWS_AS(evolve_photon_kac(rs, -0.5, 0.01, 10), ValidationError);
  CHECK_THROWS_AS(evolve_maxwell_rs(rs, -0.01, 10), ValidationError);
}

namespace {

/// Test-side spectral curl, independent of the solver path.
RealVec3Field curl_of(const Grid3D& g, const RealVec3Field& f) {
  Fft3D fft(g);
  std::array<std::vector<cplx>, 3> z;
  for (int c = 0; c < 3; ++c) {
    z[c].assign(g.size(), 0.0);
    for (std::size_t q = 0; q < g.size(); ++q) z[c][q] = f[c][q];
    fft.forward(z[c]);
  }
  const auto kx = fft_wavenumbers(g.n[0], g.d[0]);
  const auto ky = fft_wavenumbers(g.n[1], g.d[1]);
  const auto kz = fft_wavenumbers(g.n[2], g.d[2]);
  std::array<std::vector<cplx>, 3> out;
  for (int c = 0; c < 3; ++c) out[c].assign(g.size(), 0.0);
  std::size_t idx = 0;
  const cplx i1(0.0, 1.0);
  for (int i = 0; i < g.n[0]; ++i)
    for (int j = 0; j < g.n[1]; ++j)
      for (int l = 0; l < g.n[2]; ++l, ++idx) {
        out[0][idx] = i1 * (ky[j] * z[2][idx] - kz[l] * z[1][idx]);
        out[1][idx] = i1 * (kz[l] * z[0][idx] - kx[i] * z[2][idx]);
        out[2][idx] = i1 * (kx[i] * z[1][idx] - ky[j] * z[0][idx]);
      }
  RealVec3Field result;
  for (int c = 0; c < 3; ++c) {
    fft.inverse(out[c]);
    result[c].resize(g.size());
    for (std::size_t q = 0; q < g.size(); ++q) result[c][q] = out[c][q].real();
  }
  return result;
}

}  // namespace

TEST_CASE("reconstructed E and B satisfy the first-order Maxwell system") {
  // dE/dt = c curl B and dB/dt = -c curl E checked against centered time
  // differences of snapshots; the residual is the O(dt^2) difference error.
  auto g = small_grid();
  RealVec3Field e, b;
  random_eb(g, e, b);
  auto rs = rs_from_eb(g, e, b);
  auto residual = [&](double dt) {
    auto prev = evolve_maxwell_rs(rs, dt, 9);
    auto cur = evolve_maxwell_rs(rs, dt, 10);
    auto next = evolve_maxwell_rs(rs, dt, 11);
    auto ebp = eb_from_rs(prev);
    auto ebc = eb_from_rs(cur);
    auto ebn = eb_from_rs(next);
    auto curl_b = curl_of(g, ebc.b);
    auto curl_e = curl_of(g, ebc.e);
    double worst = 0.0;
    for (int c = 0; c < 3; ++c)
      for (std::size_t q = 0; q < g.size(); ++q) {
        const double dedt = (ebn.e[c][q] - ebp.e[c][q]) / (2.0 * dt);
        const double dbdt = (ebn.b[c][q] - ebp.b[c][q]) / (2.0 * dt);
        worst = std::max(worst, std::abs(dedt - curl_b[c][q]));
        worst = std::max(worst, std::abs(dbdt + curl_e[c][q]));
      }
    return worst;
  };
  const double r1 = residual(0.04);
  const double r2 = residual(0.02);
  CHECK(r1 < 1e-2);
  CHECK(r1 / r2 > 3.0);  // O(dt^2)
}
