#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "fene/coupled.hpp"
#include "fene/fluid.hpp"

using namespace fene;

namespace {

const double kPi = std::numbers::pi;

SolverConfig chain_config() {
  SolverConfig cfg;
  cfg.n = 16;
  cfg.n_r = 8;
  cfg.n_theta = 8;
  cfg.dt = 2.5e-3;
  cfg.t_end = 0.05;
  cfg.snapshot_stride = 1;
  cfg.polymer.k = 2.0;
  cfg.polymer.epsilon = 0.5;
  cfg.polymer.re = 0.5;
  cfg.polymer.drag = DragType::kFull;
  cfg.besov = BesovParams(2.5, 2.0, 2.0);
  return cfg;
}

State small_data(const SolverConfig& cfg) {
  State s;
  s.t = 0.0;
  s.u = taylor_green(cfg.n, 0.2, 0.0, cfg.polymer.nu());

  auto grid = cfg.make_grid();
  Distribution psi(cfg.n, grid, 1.0);
  for (std::int64_t node = 0; node < psi.planes(); ++node) {
    const int i = static_cast<int>(node) / grid->n_theta();
    const int m = static_cast<int>(node) % grid->n_theta();
    const double h = grid->r(i) * grid->cos_th(m);
    double* plane = psi.plane(node);
    for (int iy = 0; iy < cfg.n; ++iy)
      for (int ix = 0; ix < cfg.n; ++ix)
        plane[static_cast<size_t>(iy) * cfg.n + ix] +=
            0.2 * h * std::cos(2.0 * kPi * ix / cfg.n);
  }
  s.psi = std::move(psi);
  return s;
}

}  // namespace

TEST_SUITE("picard") {

TEST_CASE("iteration rejects unusable arguments") {
  SolverConfig cfg = chain_config();
  State s = small_data(cfg);
  CHECK_THROWS_AS(picard_run(s.u, s.psi, cfg, 1), std::invalid_argument);
  CHECK_THROWS_AS(picard_run(s.u, s.psi, cfg, 6, 1), std::invalid_argument);
  SpectralField wrong(32, 2);
  CHECK_THROWS_AS(picard_run(wrong, s.psi, cfg, 6), std::invalid_argument);
}

TEST_CASE("rest data is a fixed point from the first iterate") {
  SolverConfig cfg = chain_config();
  State s = rest_state(cfg);
  PicardResult res = picard_run(s.u, s.psi, cfg, 6);
  REQUIRE(res.a_seq.size() == 6);
  REQUIRE(res.b_seq.size() == 6);
  for (double a : res.a_seq) CHECK(a < 1e-13);
  for (double b : res.b_seq) CHECK(b < 1e-12);
  CHECK(res.final_state.u.l2_norm() < 1e-13);
}

TEST_CASE("increments contract geometrically on small smooth data") {
  SolverConfig cfg = chain_config();
  State s = small_data(cfg);
  const int iters = 10;
  PicardResult res = picard_run(s.u, s.psi, cfg, iters);
  REQUIRE(static_cast<int>(res.a_seq.size()) == iters);
  CHECK(res.a_seq[0] > 0.0);
  for (int i = 3; i < iters; ++i) {
    const double prev = std::max(res.a_seq[i - 1], res.a_seq[i - 2]);
    CHECK(res.a_seq[i] <= 0.95 * prev);
    const double prev_b = std::max(res.b_seq[i - 1], res.b_seq[i - 2]);
    CHECK(res.b_seq[i] <= 0.95 * std::max(prev_b, 1e-14));
  }
}

TEST_CASE("the iteration limit is the direct integration") {
  SolverConfig cfg = chain_config();
  State s = small_data(cfg);
  PicardResult res = picard_run(s.u, s.psi, cfg, 12);

  SolverConfig direct_cfg = cfg;
  direct_cfg.splitting = Splitting::kLie;
  direct_cfg.snapshot_stride = cfg.steps();
  CoupledSolver solver(direct_cfg);
  RunRecord rec = solver.run(small_data(cfg));

  CHECK((res.final_state.u - rec.final_state.u).l2_norm() < 1e-6);

  Distribution diff = res.final_state.psi;
  auto dv = diff.values();
  auto rv = rec.final_state.psi.values();
  for (size_t i = 0; i < dv.size(); ++i) dv[i] -= rv[i];
  CHECK(diff.weighted_lp_norm(2.0) < 1e-5);
  CHECK(res.final_state.t == doctest::Approx(cfg.t_end));
}

}  // TEST_SUITE
