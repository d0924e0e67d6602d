#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fene/besov.hpp"
#include "fene/coupled.hpp"
#include "fene/dyadic.hpp"
#include "fene/fluid.hpp"
#include "fene/fokker_planck.hpp"

namespace fene {

namespace {

/// Everything the next iterate consumes from this one: the fluid stage
/// fields of every step, the stress of every pre-step density, and the
/// density itself at a few sample times for the increment norms. Iterate
/// 0 is constant in time and stores single entries.
struct Trajectory {
  bool constant = false;
  std::vector<StepStages> stages;
  std::vector<SpectralField> tau;
  SpectralField final_u;
  std::vector<Distribution> psi_samples;

  const StepStages& stages_at(int m) const {
    return constant ? stages[0] : stages[m];
  }
  const SpectralField& tau_at(int m) const {
    return constant ? tau[0] : tau[m];
  }
  const SpectralField& u_after(int m) const {
    if (constant) return stages[0].s0;
    return m + 1 < static_cast<int>(stages.size()) ? stages[m + 1].s0
                                                   : final_u;
  }
  const Distribution& psi_sample(int q) const {
    return constant ? psi_samples[0] : psi_samples[q];
  }
};

std::vector<double> diff_block_norms(const SpectralField& a,
                                     const SpectralField& b, double p) {
  return block_lp_norms(a - b, p);
}

std::vector<double> diff_block_norms(const Distribution& a,
                                     const Distribution& b, double p) {
  Distribution d = a;
  auto va = d.values();
  auto vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) va[i] -= vb[i];
  return block_lp_norms(d, p);
}

}  // namespace

PicardResult picard_run(const SpectralField& u0, const Distribution& psi0,
                        const SolverConfig& cfg, int n_iters,
                        int psi_snapshots) {
  SolverConfig c = cfg;
  c.splitting = Splitting::kLie;  // the chain linearizes the kLie path
  c.validate();
  if (n_iters < 2)
    throw std::invalid_argument("picard_run: n_iters must be at least 2");
  if (psi_snapshots < 2)
    throw std::invalid_argument("picard_run: psi_snapshots must be at least 2");
  if (u0.n() != c.n || psi0.n() != c.n)
    throw std::invalid_argument("picard_run: data grid mismatch");

  const auto grid = psi0.grid_ptr();
  const FpPropagator half(grid, c.dt / 2.0);
  const int steps = c.steps();
  const int j_top = DyadicPartition::for_grid(c.n).j_max() + 1;
  const auto cap = [&](int j) { return std::min(j, j_top); };

  // Density sample steps for the increment norms, endpoints included.
  std::vector<int> sample_steps(psi_snapshots);
  for (int q = 0; q < psi_snapshots; ++q)
    sample_steps[q] = static_cast<int>(
        std::llround(static_cast<double>(q) * steps / (psi_snapshots - 1)));

  Trajectory prev;
  prev.constant = true;
  prev.stages.push_back({low_freq(u0, cap(1)), SpectralField(c.n, 2),
                         SpectralField(c.n, 2)});
  prev.stages[0].s1 = prev.stages[0].s0;
  prev.stages[0].s2 = prev.stages[0].s0;
  prev.psi_samples.push_back(low_freq(psi0, cap(1)));
  prev.tau.push_back(assemble_stress(prev.psi_samples[0], c.polymer.epsilon));
  prev.final_u = prev.stages[0].s0;

  const BesovParams bu = c.besov.shifted(-1.0);
  const BesovParams bpsi = c.besov.shifted(-2.0);
  PicardResult result;

  SpectralField u_cur;
  Distribution psi_cur;
  for (int it = 0; it < n_iters; ++it) {
    // Integrate iterate it+1 against the stored iterate it.
    u_cur = low_freq(u0, cap(it + 2));
    psi_cur = low_freq(psi0, cap(it + 2));

    Trajectory cur;
    cur.stages.reserve(steps);
    cur.tau.reserve(steps);
    cur.psi_samples.reserve(psi_snapshots);

    std::vector<std::vector<double>> a_series;
    std::vector<std::vector<double>> b_series;
    a_series.push_back(
        diff_block_norms(u_cur, prev.stages_at(0).s0, c.besov.p));
    b_series.push_back(diff_block_norms(psi_cur, prev.psi_sample(0), c.besov.p));
    cur.psi_samples.push_back(psi_cur);
    int next_sample = 1;

    for (int m = 0; m < steps; ++m) {
      cur.tau.push_back(assemble_stress(psi_cur, c.polymer.epsilon));
      StepStages rec;
      SpectralField u_next = ns_step_driven(
          u_cur, &prev.stages_at(m), prev.tau_at(m), c.dt, c.polymer, &rec);
      cur.stages.push_back(std::move(rec));

      const SpectralField& wind = prev.u_after(m);
      advect(psi_cur, wind, c.dt);
      fp_step(psi_cur, DragField::from_velocity(wind, c.polymer.drag), half,
              c.dt);
      u_cur = std::move(u_next);

      if ((m + 1) % c.snapshot_stride == 0)
        a_series.push_back(
            diff_block_norms(u_cur, prev.u_after(m), c.besov.p));
      if (next_sample < psi_snapshots && m + 1 == sample_steps[next_sample]) {
        b_series.push_back(
            diff_block_norms(psi_cur, prev.psi_sample(next_sample), c.besov.p));
        cur.psi_samples.push_back(psi_cur);
        ++next_sample;
      }
    }
    cur.final_u = u_cur;

    const double inf = std::numeric_limits<double>::infinity();
    result.a_seq.push_back(
        chemin_lerner_norm(a_series, c.dt * c.snapshot_stride, inf, bu));
    result.b_seq.push_back(chemin_lerner_norm(
        b_series, c.t_end / (psi_snapshots - 1), inf, bpsi));

    prev = std::move(cur);
  }

  result.final_state = State{std::move(u_cur), std::move(psi_cur),
                             c.t_end};
  return result;
}

}  // namespace fene
