#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "fene/coupled.hpp"
#include "fene/errors.hpp"
#include "fene/fluid.hpp"

using namespace fene;

namespace {

const double kPi = std::numbers::pi;

SolverConfig tiny_config() {
  SolverConfig cfg;
  cfg.n = 16;
  cfg.n_r = 8;
  cfg.n_theta = 8;
  cfg.dt = 2e-3;
  cfg.t_end = 0.04;
  cfg.snapshot_stride = 1;
  cfg.polymer.k = 2.0;
  cfg.polymer.epsilon = 0.5;
  cfg.polymer.re = 0.5;
  cfg.polymer.drag = DragType::kFull;
  cfg.besov = BesovParams(2.5, 2.0, 2.0);
  return cfg;
}

// Positive density with x-structure on blocks -1/0 and a genuine R
// dependence; velocity a swirl plus an off-axis mode.
State structured_state(const SolverConfig& cfg) {
  State s;
  s.t = 0.0;
  s.u = taylor_green(cfg.n, 0.4, 0.0, cfg.polymer.nu());

  auto grid = cfg.make_grid();
  Distribution psi(cfg.n, grid, 1.0);
  const int n = cfg.n;
  for (std::int64_t node = 0; node < psi.planes(); ++node) {
    const int i = static_cast<int>(node) / grid->n_theta();
    const int m = static_cast<int>(node) % grid->n_theta();
    const double h =
        grid->r(i) * (grid->cos_th(m) + 0.5 * grid->sin_th(m));
    double* plane = psi.plane(node);
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix)
        plane[static_cast<size_t>(iy) * n + ix] +=
            0.35 * h * std::cos(2.0 * kPi * ix / n);
  }
  s.psi = std::move(psi);
  return s;
}

double state_u_l2_distance(const State& a, const State& b) {
  return (a.u - b.u).l2_norm();
}

}  // namespace

TEST_SUITE("coupled") {

TEST_CASE("config validation calls out inconsistent discretizations") {
  SolverConfig cfg = tiny_config();
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.steps() == 20);

  SolverConfig bad = cfg;
  bad.t_end = 0.041;  // not a whole number of steps
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.snapshot_stride = 3;  // 20 % 3 != 0
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.n = 12;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.dt = -1e-3;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.besov.p = 0.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("state checks reject broken inputs") {
  SolverConfig cfg = tiny_config();
  State s = rest_state(cfg);
  CHECK_NOTHROW(check_state(s));

  State comp = rest_state(cfg);
  std::vector<double> v(static_cast<size_t>(cfg.n) * cfg.n * 2, 0.0);
  for (int ix = 0; ix < cfg.n; ++ix)
    v[ix] = std::sin(2.0 * kPi * ix / cfg.n);
  comp.u = SpectralField::from_physical(cfg.n, 2, v);
  CHECK_THROWS_AS(check_state(comp), HypothesisViolation);

  State nan_psi = rest_state(cfg);
  nan_psi.psi.values()[5] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(check_state(nan_psi), HypothesisViolation);

  State negative = rest_state(cfg);
  for (double& g : negative.psi.values()) g = -1.0;
  CHECK_THROWS_AS(check_state(negative), HypothesisViolation);
}

TEST_CASE("rest is a fixed point of the full dynamics") {
  for (DragType drag : {DragType::kCorotational, DragType::kFull}) {
    SolverConfig cfg = tiny_config();
    cfg.polymer.drag = drag;
    CoupledSolver solver(cfg);
    State s = rest_state(cfg);
    for (int i = 0; i < 100; ++i) solver.step(s);
    CHECK(s.u.l2_norm() < 1e-12);
    double dev = 0.0;
    for (double v : s.psi.values()) dev = std::max(dev, std::abs(v - 1.0));
    CHECK(dev < 1e-11);
    CHECK(s.t == doctest::Approx(100 * cfg.dt).epsilon(1e-12));
  }
}

TEST_CASE("equilibrium swirl follows the closed-form decay") {
  for (double nu : {0.0, 0.05}) {
    SolverConfig cfg = tiny_config();
    cfg.n = 32;
    cfg.polymer.drag = DragType::kCorotational;
    cfg.polymer = cfg.polymer.at_nu(nu);
    CoupledSolver solver(cfg);

    State s;
    s.t = 0.0;
    s.u = taylor_green(cfg.n, 1.0, 0.0, nu);
    s.psi = Distribution::equilibrium(cfg.n, solver.grid());

    double max_err = 0.0;
    for (int i = 0; i < 50; ++i) {
      solver.step(s);
      SpectralField exact = taylor_green(cfg.n, 1.0, s.t, nu);
      max_err = std::max(max_err, (s.u - exact).l2_norm());
    }
    CHECK(max_err < 1e-6);
  }
}

TEST_CASE("mass and incompressibility hold along a structured run") {
  SolverConfig cfg = tiny_config();
  CoupledSolver solver(cfg);
  State s = structured_state(cfg);
  const double mass0 = s.psi.global_mass();
  for (int i = 0; i < 50; ++i) {
    solver.step(s);
    CHECK(s.u.divergence_linf() < 1e-12);
  }
  CHECK(std::abs(s.psi.global_mass() - mass0) < 1e-10 * mass0);
  CHECK(s.psi.min_value() > 0.0);
  CHECK(s.u.l2_norm() > 0.0);
}

TEST_CASE("splitting orders separate Lie from Strang") {
  auto final_u = [&](Splitting split, double dt) {
    SolverConfig cfg = tiny_config();
    cfg.splitting = split;
    cfg.dt = dt;
    cfg.t_end = 0.04;
    CoupledSolver solver(cfg);
    State s = structured_state(cfg);
    const int m = static_cast<int>(std::llround(cfg.t_end / dt));
    for (int i = 0; i < m; ++i) solver.step(s);
    return s;
  };

  State ref = final_u(Splitting::kStrang, 2.5e-4);
  for (Splitting split : {Splitting::kLie, Splitting::kStrang}) {
    const double e1 =
        state_u_l2_distance(final_u(split, 4e-3), ref);
    const double e2 =
        state_u_l2_distance(final_u(split, 2e-3), ref);
    const double e3 =
        state_u_l2_distance(final_u(split, 1e-3), ref);
    const double o1 = std::log2(e1 / e2);
    const double o2 = std::log2(e2 / e3);
    if (split == Splitting::kLie) {
      CHECK(o1 > 0.7);
      CHECK(o1 < 1.35);
      CHECK(o2 > 0.7);
      CHECK(o2 < 1.35);
    } else {
      CHECK(o1 > 1.6);
      CHECK(o1 < 2.5);
      CHECK(o2 > 1.6);
      CHECK(o2 < 2.5);
    }
  }
}

TEST_CASE("snapshot records have consistent shapes") {
  SolverConfig cfg = tiny_config();
  cfg.snapshot_stride = 4;
  CoupledSolver solver(cfg);
  RunRecord rec = solver.run(structured_state(cfg));

  const size_t snaps = static_cast<size_t>(cfg.steps() / 4) + 1;
  CHECK(rec.times.size() == snaps);
  CHECK(rec.u_besov.size() == snaps);
  CHECK(rec.psi_besov.size() == snaps);
  CHECK(rec.energy.size() == snaps);
  CHECK(rec.mass.size() == snaps);
  CHECK(rec.entropy.size() == snaps);
  CHECK(rec.u_blocks.size() == snaps);
  CHECK(rec.psi_blocks.size() == snaps);
  CHECK(rec.snapshot_dt == doctest::Approx(cfg.dt * 4));
  CHECK_FALSE(rec.aborted);
  CHECK(rec.times.front() == 0.0);
  CHECK(rec.times.back() == doctest::Approx(cfg.t_end));
  CHECK(rec.final_state.t == doctest::Approx(cfg.t_end));
  const size_t blocks = rec.u_blocks.front().size();
  for (const auto& row : rec.u_blocks) CHECK(row.size() == blocks);
  for (double e : rec.energy) CHECK(e > 0.0);
}

TEST_CASE("running equals stepping") {
  SolverConfig cfg = tiny_config();
  cfg.t_end = 0.008;  // 4 steps
  cfg.snapshot_stride = 2;
  CoupledSolver solver(cfg);
  State manual = structured_state(cfg);
  RunRecord rec = solver.run(structured_state(cfg));
  for (int i = 0; i < 4; ++i) solver.step(manual);
  CHECK(state_u_l2_distance(rec.final_state, manual) == 0.0);
  auto a = rec.final_state.psi.values();
  auto b = manual.psi.values();
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("norm inflation beyond the safety factor aborts the run") {
  SolverConfig cfg = tiny_config();
  // At this regularity the quadratic cascade inflates the velocity norm
  // past 1e3 x its initial size within a few steps.
  cfg.besov = BesovParams(24.0, 2.0, 2.0);
  cfg.dt = 1e-3;
  cfg.t_end = 0.02;
  cfg.polymer = cfg.polymer.at_nu(0.0);
  cfg.polymer.drag = DragType::kCorotational;
  CoupledSolver solver(cfg);

  State s;
  s.t = 0.0;
  std::vector<double> v(static_cast<size_t>(cfg.n) * cfg.n * 2);
  for (int iy = 0; iy < cfg.n; ++iy)
    for (int ix = 0; ix < cfg.n; ++ix) {
      const double x = 2.0 * kPi * ix / cfg.n;
      const double y = 2.0 * kPi * iy / cfg.n;
      const size_t i = static_cast<size_t>(iy) * cfg.n + ix;
      // Swirl plus an off-axis shear so the quadratic term populates
      // higher shells immediately.
      v[i] = 0.7 * std::sin(x) * std::cos(y) + 0.2 * std::sin(2.0 * y + x);
      v[static_cast<size_t>(cfg.n) * cfg.n + i] =
          -0.7 * std::cos(x) * std::sin(y) - 0.1 * std::sin(2.0 * y + x);
    }
  s.u = SpectralField::from_physical(cfg.n, 2, v);
  leray_project(s.u);
  s.u.zero_mean();
  s.psi = Distribution::equilibrium(cfg.n, solver.grid());

  bool aborted = false;
  try {
    solver.run(std::move(s));
  } catch (const AbortedRun& e) {
    aborted = true;
    CHECK(e.partial().aborted);
    CHECK_FALSE(e.partial().times.empty());
    CHECK(e.partial().u_besov.back() >
          1e3 * (e.partial().u_besov.front() + e.partial().psi_besov.front()));
  }
  CHECK(aborted);
}

TEST_CASE("checkpoints restore bitwise") {
  SolverConfig cfg = tiny_config();
  CoupledSolver solver(cfg);
  State s = structured_state(cfg);
  for (int i = 0; i < 3; ++i) solver.step(s);

  const std::string path =
      (std::filesystem::temp_directory_path() / "fene_ckpt").string();
  save_checkpoint(path, s);
  State back = load_checkpoint(path);
  std::remove((path + ".u").c_str());
  std::remove((path + ".psi").c_str());
  std::remove(path.c_str());

  CHECK(back.t == s.t);
  for (int c = 0; c < 2; ++c) {
    auto a = s.u.comp(c);
    auto b = back.u.comp(c);
    for (size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].real() == b[i].real());
      CHECK(a[i].imag() == b[i].imag());
    }
  }
  auto pa = s.psi.values();
  auto pb = back.psi.values();
  for (size_t i = 0; i < pa.size(); ++i) CHECK(pa[i] == pb[i]);
}

TEST_CASE("identical states have identically zero dependence distances") {
  SolverConfig cfg = tiny_config();
  cfg.t_end = 0.01;
  State a = structured_state(cfg);
  State b = structured_state(cfg);
  DependenceReport rep = continuous_dependence(a, b, cfg, 0.25);
  CHECK(rep.input_u == 0.0);
  CHECK(rep.input_psi == 0.0);
  CHECK(rep.output_u == 0.0);
  CHECK(rep.output_psi == 0.0);
}

TEST_CASE("stepping a CFL-violating state raises a stability error") {
  SolverConfig cfg = tiny_config();
  cfg.dt = 0.1;
  cfg.t_end = 0.4;
  CoupledSolver solver(cfg);
  State s = rest_state(cfg);
  s.u = taylor_green(cfg.n, 30.0, 0.0, 0.0);
  CHECK_THROWS_AS(solver.step(s), StabilityError);
}

}  // TEST_SUITE
