#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include "fene/errors.hpp"
#include "fene/fluid.hpp"
#include "fene/fokker_planck.hpp"

using namespace fene;

namespace {

const double kPi = std::numbers::pi;

std::vector<double> sampled(int n, int comps,
                            double (*f)(double, double, int)) {
  std::vector<double> v(static_cast<size_t>(n) * n * comps);
  for (int c = 0; c < comps; ++c)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix)
        v[(static_cast<size_t>(c) * n + iy) * n + ix] =
            f(2.0 * kPi * ix / n, 2.0 * kPi * iy / n, c);
  return v;
}

SpectralField gradient_field(int n) {
  // grad sin(x + 2y) = (cos(x+2y), 2 cos(x+2y)).
  return SpectralField::from_physical(
      n, 2, sampled(n, 2, [](double x, double y, int c) {
        return (c == 0 ? 1.0 : 2.0) * std::cos(x + 2.0 * y);
      }));
}

SpectralField random_divfree(int n, std::uint64_t seed, double amp) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(static_cast<size_t>(n) * n * 2);
  for (auto& x : v) x = dist(rng);
  SpectralField u = SpectralField::from_physical(n, 2, v);
  leray_project(u);
  u.zero_mean();
  u.scale(amp / std::max(u.linf_norm(), 1e-30));
  return u;
}

double max_coef_diff(const SpectralField& a, const SpectralField& b) {
  double m = 0.0;
  for (int c = 0; c < a.components(); ++c) {
    auto ca = a.comp(c);
    auto cb = b.comp(c);
    for (size_t i = 0; i < ca.size(); ++i)
      m = std::max(m, std::abs(ca[i] - cb[i]));
  }
  return m;
}

PolymerParams stressless() {
  PolymerParams p;
  p.k = 2.0;
  p.epsilon = 0.5;
  p.re = std::numeric_limits<double>::infinity();
  return p;
}

}  // namespace

TEST_SUITE("fluid") {

TEST_CASE("projection kills gradients and fixes solenoidal fields") {
  const int n = 32;
  SpectralField grad = gradient_field(n);
  SpectralField killed = grad;
  leray_project(killed);
  CHECK(killed.l2_norm() < 1e-13 * grad.l2_norm());

  SpectralField tg = taylor_green(n, 1.0, 0.0, 0.0);
  SpectralField projected = tg;
  leray_project(projected);
  CHECK(max_coef_diff(tg, projected) < 1e-14);

  SpectralField u = random_divfree(n, 61, 1.0);
  CHECK(u.divergence_linf() < 1e-13);
  SpectralField twice = u;
  leray_project(twice);
  CHECK(max_coef_diff(u, twice) < 1e-14);
}

TEST_CASE("projection leaves the mean flow untouched") {
  const int n = 16;
  std::vector<double> v(static_cast<size_t>(n) * n * 2);
  std::fill(v.begin(), v.begin() + n * n, 0.7);
  std::fill(v.begin() + n * n, v.end(), -0.2);
  SpectralField u = SpectralField::from_physical(n, 2, v);
  leray_project(u);
  CHECK(std::abs(u.at(0, 0, 0) - cplx(0.7, 0.0)) < 1e-15);
  CHECK(std::abs(u.at(1, 0, 0) - cplx(-0.2, 0.0)) < 1e-15);
}

TEST_CASE("tensor divergence matches hand derivatives") {
  const int n = 32;
  // tau = (cos 2x, sin x sin y, cos 2y):
  // (div tau)_x = -2 sin 2x + sin x cos y
  // (div tau)_y = cos x sin y - 2 sin 2y.
  auto tau_vals = sampled(n, 3, [](double x, double y, int c) {
    if (c == 0) return std::cos(2.0 * x);
    if (c == 1) return std::sin(x) * std::sin(y);
    return std::cos(2.0 * y);
  });
  SpectralField tau = SpectralField::from_physical(n, 3, tau_vals);
  SpectralField div = tensor_divergence(tau);
  auto expect = sampled(n, 2, [](double x, double y, int c) {
    if (c == 0) return -2.0 * std::sin(2.0 * x) + std::sin(x) * std::cos(y);
    return std::cos(x) * std::sin(y) - 2.0 * std::sin(2.0 * y);
  });
  for (int c = 0; c < 2; ++c) {
    auto got = div.to_physical(c);
    for (int i = 0; i < n * n; ++i)
      CHECK(got[i] ==
            doctest::Approx(expect[static_cast<size_t>(c) * n * n + i])
                .epsilon(1e-12)
                .scale(1.0));
  }
}

TEST_CASE("assembled stress agrees with the per-node reference") {
  const int n = 8;
  auto grid = std::make_shared<const ConfigGrid>(8, 8, 2.0);
  Distribution g(n, grid);
  std::mt19937_64 rng(62);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  for (double& v : g.values()) v = dist(rng);

  const double eps = 0.4;
  SpectralField tau = assemble_stress(g, eps);
  REQUIRE(tau.components() == 3);
  std::vector<double> tp[3] = {tau.to_physical(0), tau.to_physical(1),
                               tau.to_physical(2)};

  std::vector<double> slab(static_cast<size_t>(grid->nodes()));
  for (std::int64_t x = 0; x < g.plane_size(); ++x) {
    for (std::int64_t node = 0; node < g.planes(); ++node)
      slab[node] = g.plane(node)[x];
    auto t = grid->stress(slab, eps);
    for (int c = 0; c < 3; ++c)
      CHECK(tp[c][x] == doctest::Approx(t[c]).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("equilibrium stress field is isotropic and x-independent") {
  const int n = 8;
  auto grid = std::make_shared<const ConfigGrid>(32, 16, 2.0);
  Distribution eq = Distribution::equilibrium(n, grid);
  const double eps = 0.5;
  SpectralField tau = assemble_stress(eq, eps);
  CHECK(std::abs(tau.at(0, 0, 0).real() - eps) < 5e-3);
  CHECK(std::abs(tau.at(2, 0, 0).real() - eps) < 5e-3);
  CHECK(std::abs(tau.at(1, 0, 0)) < 1e-14);
  for (int c = 0; c < 3; ++c)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix)
        if (ix != 0 || iy != 0) CHECK(std::abs(tau.at(c, iy, ix)) < 1e-13);
}

TEST_CASE("swirl pressure closed form") {
  const int n = 32;
  const double amp = 0.8;
  SpectralField u = taylor_green(n, amp, 0.0, 0.0);
  SpectralField tau(n, 3);
  SpectralField p = pressure(u, tau, nullptr, stressless());
  SpectralField expect = taylor_green_pressure(n, amp, 0.0, 0.0);
  CHECK(max_coef_diff(p, expect) < 1e-13);
  CHECK(std::abs(p.at(0, 0, 0)) == 0.0);
}

TEST_CASE("an external gradient force lands entirely in the pressure") {
  const int n = 32;
  SpectralField u = taylor_green(n, 0.5, 0.0, 0.0);
  SpectralField tau(n, 3);
  SpectralField f = gradient_field(n);
  SpectralField with = pressure(u, tau, &f, stressless());
  SpectralField without = pressure(u, tau, nullptr, stressless());
  // The difference solves grad dP = grad sin(x+2y).
  SpectralField dp = with - without;
  auto got = dp.to_physical(0);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const double expect =
          std::sin(2.0 * kPi * ix / n + 4.0 * kPi * iy / n);
      CHECK(got[static_cast<size_t>(iy) * n + ix] ==
            doctest::Approx(expect).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("swirl advances exactly through the viscous factor") {
  const int n = 32;
  const double amp = 1.0, nu = 0.1, dt = 1e-2;
  PolymerParams params = stressless().at_nu(nu);
  SpectralField u = taylor_green(n, amp, 0.0, nu);
  SpectralField tau(n, 3);
  SpectralField next = ns_step(u, tau, dt, params, true, false);
  SpectralField expect = taylor_green(n, amp, dt, nu);
  CHECK(max_coef_diff(next, expect) < 1e-13);
}

TEST_CASE("linear steps reduce to the exact heat semigroup") {
  const int n = 16;
  const double nu = 0.3, dt = 0.05;
  PolymerParams params = stressless().at_nu(nu);
  SpectralField u = random_divfree(n, 63, 1.0);
  SpectralField tau(n, 3);
  SpectralField next = ns_step(u, tau, dt, params, false, false);
  for (int c = 0; c < 2; ++c)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const double kx = wavenumber(ix, n), ky = wavenumber(iy, n);
        const cplx expect =
            u.at(c, iy, ix) * std::exp(-nu * (kx * kx + ky * ky) * dt);
        CHECK(std::abs(next.at(c, iy, ix) - expect) < 1e-14);
      }
}

TEST_CASE("inviscid steps never gain energy") {
  const int n = 32;
  PolymerParams params = stressless();  // nu = 0, no stress feedback
  SpectralField u = random_divfree(n, 64, 0.5);
  SpectralField tau(n, 3);
  double prev = u.l2_norm();
  for (int s = 0; s < 20; ++s) {
    u = ns_step(u, tau, 5e-3, params, true, false);
    const double e = u.l2_norm();
    CHECK(e <= prev * (1.0 + 1e-13));
    prev = e;
    CHECK(u.divergence_linf() < 1e-12);
  }
}

TEST_CASE("momentum tendency is linear in the stress") {
  const int n = 16;
  PolymerParams params;
  params.k = 2.0;
  params.epsilon = 0.5;
  params.re = 2.0;
  SpectralField u = random_divfree(n, 65, 0.8);
  std::mt19937_64 rng(66);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> tv(static_cast<size_t>(n) * n * 3);
  for (auto& v : tv) v = dist(rng);
  SpectralField tau1 = SpectralField::from_physical(n, 3, tv);
  for (auto& v : tv) v = dist(rng);
  SpectralField tau2 = SpectralField::from_physical(n, 3, tv);

  SpectralField mix(n, 3);
  mix.axpy(2.0, tau1);
  mix.axpy(-0.5, tau2);

  SpectralField base = ns_rhs(u, SpectralField(n, 3), params, true, true);
  SpectralField r1 = ns_rhs(u, tau1, params, true, true);
  SpectralField r2 = ns_rhs(u, tau2, params, true, true);
  SpectralField rm = ns_rhs(u, mix, params, true, true);

  // rm - base == 2 (r1 - base) - 0.5 (r2 - base).
  SpectralField expect = base;
  expect.scale(-0.5);
  expect.axpy(2.0, r1);
  expect.axpy(-0.5, r2);
  CHECK(max_coef_diff(rm, expect) < 1e-12);

  // With advection off the tendency is the projected stress divergence.
  SpectralField lin = ns_rhs(u, tau1, params, false, true);
  SpectralField div = tensor_divergence(tau1);
  leray_project(div);
  div.scale(params.stress_coef());
  div.zero_mean();
  lin.zero_mean();
  CHECK(max_coef_diff(lin, div) < 1e-12);
}

TEST_CASE("driven steps replay their own stages exactly") {
  const int n = 16;
  PolymerParams params = stressless();
  SpectralField u = random_divfree(n, 67, 0.6);
  SpectralField tau(n, 3);
  const double dt = 5e-3;

  StepStages stages;
  SpectralField direct = ns_step_driven(u, nullptr, tau, dt, params, &stages);
  SpectralField plain = ns_step(u, tau, dt, params, true, false);
  CHECK(max_coef_diff(direct, plain) == 0.0);

  SpectralField replay = ns_step_driven(u, &stages, tau, dt, params, nullptr);
  CHECK(max_coef_diff(replay, direct) == 0.0);
}

TEST_CASE("steps reject CFL violations and non-finite modes") {
  const int n = 32;
  PolymerParams params = stressless();
  SpectralField tau(n, 3);
  SpectralField fast = taylor_green(n, 50.0, 0.0, 0.0);
  CHECK_THROWS_AS(ns_step(fast, tau, 0.1, params), StabilityError);

  SpectralField u = taylor_green(n, 1.0, 0.0, 0.0);
  u.at(0, 1, 1) = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
  u.at(0, n - 1, n - 1) = u.at(0, 1, 1);
  CHECK_THROWS_AS(ns_step(u, tau, 1e-3, params), NumericalBreakdown);
}

TEST_CASE("scalar transport with a constant source integrates exactly") {
  const int n = 16;
  SpectralField v(n, 2);  // no wind
  std::vector<double> ones(static_cast<size_t>(n) * n, 2.5);
  SpectralField src = SpectralField::from_physical(n, 1, ones);
  SpectralField f(n, 1);
  const double dt = 0.02;
  SpectralField next = transport_diffusion_step(f, v, src, 0.0, dt);
  // d_t f = 2.5 with f0 = 0: one step lands on 2.5 dt everywhere.
  auto got = next.to_physical(0);
  for (double x : got) CHECK(x == doctest::Approx(2.5 * dt).epsilon(1e-13));
}

TEST_CASE("scalar transport reduces to the heat semigroup") {
  const int n = 16;
  const double nu = 0.4, dt = 0.03;
  SpectralField v(n, 2);
  SpectralField src(n, 1);
  auto vals = sampled(n, 1, [](double x, double y, int) {
    return std::cos(2.0 * x) + 0.5 * std::sin(y);
  });
  SpectralField f = SpectralField::from_physical(n, 1, vals);
  SpectralField next = transport_diffusion_step(f, v, src, nu, dt);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const double kx = wavenumber(ix, n), ky = wavenumber(iy, n);
      const cplx expect =
          f.at(0, iy, ix) * std::exp(-nu * (kx * kx + ky * ky) * dt);
      CHECK(std::abs(next.at(0, iy, ix) - expect) < 1e-14);
    }
}

TEST_CASE("swirl fields decay at rate two nu") {
  const int n = 16;
  SpectralField early = taylor_green(n, 1.0, 0.0, 0.25);
  SpectralField late = taylor_green(n, 1.0, 1.0, 0.25);
  CHECK(late.l2_norm() / early.l2_norm() ==
        doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK(early.divergence_linf() < 1e-14);
}

}  // TEST_SUITE
