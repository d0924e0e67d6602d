#include "fene/coupled.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>

#include <json.hpp>

#include "fene/errors.hpp"
#include "fene/fluid.hpp"
#include "fene/io.hpp"

namespace fene {

int SolverConfig::steps() const {
  return static_cast<int>(std::llround(t_end / dt));
}

void SolverConfig::validate() const {
  if (n < 8 || (n & (n - 1)) != 0)
    throw std::invalid_argument("SolverConfig: n must be a power of two >= 8");
  if (!(dt > 0.0) || !(t_end > 0.0))
    throw std::invalid_argument("SolverConfig: dt and t_end must be positive");
  const int m = steps();
  if (m < 1 || std::abs(m * dt - t_end) > 1e-9 * std::max(1.0, t_end))
    throw std::invalid_argument("SolverConfig: t_end is not a multiple of dt");
  if (snapshot_stride < 1 || m % snapshot_stride != 0)
    throw std::invalid_argument(
        "SolverConfig: snapshot_stride must divide the step count");
  polymer.validate();
  besov.validate();
  ConfigGrid(n_r, n_theta, polymer.k);
}

std::shared_ptr<const ConfigGrid> SolverConfig::make_grid() const {
  return std::make_shared<ConfigGrid>(n_r, n_theta, polymer.k);
}

State rest_state(const SolverConfig& cfg) {
  return State{SpectralField(cfg.n, 2),
               Distribution::equilibrium(cfg.n, cfg.make_grid()), 0.0};
}

void check_state(const State& s) {
  if (s.u.components() != 2)
    throw HypothesisViolation("check_state: velocity must have two components");
  if (s.u.n() != s.psi.n())
    throw HypothesisViolation("check_state: grid mismatch between fields");
  if (s.u.divergence_linf() > 1e-10)
    throw HypothesisViolation("check_state: velocity is not divergence-free");
  if (!s.psi.all_finite())
    throw HypothesisViolation("check_state: non-finite density");
  for (int c = 0; c < 2; ++c)
    for (const cplx& a : s.u.comp(c))
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
        throw HypothesisViolation("check_state: non-finite velocity");
  const auto mass = s.psi.mass_field();
  for (double m : mass)
    if (!(m > 0.0))
      throw HypothesisViolation("check_state: non-positive per-x mass");
}

AbortedRun::AbortedRun(const std::string& what, RunRecord partial)
    : std::runtime_error(what),
      partial_(std::make_shared<RunRecord>(std::move(partial))) {}

CoupledSolver::CoupledSolver(const SolverConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  grid_ = cfg_.make_grid();
  half_ = std::make_shared<FpPropagator>(grid_, cfg_.dt / 2.0);
}

void CoupledSolver::lie_step(State& s) const {
  const double dt = cfg_.dt;
  const SpectralField tau = assemble_stress(s.psi, cfg_.polymer.epsilon);
  SpectralField u1 = ns_step(s.u, tau, dt, cfg_.polymer);
  advect(s.psi, u1, dt);
  fp_step(s.psi, DragField::from_velocity(u1, cfg_.polymer.drag), *half_, dt);
  s.u = std::move(u1);
}

void CoupledSolver::strang_step(State& s) const {
  const double dt = cfg_.dt;
  const SpectralField tau = assemble_stress(s.psi, cfg_.polymer.epsilon);
  SpectralField u_mid = ns_step(s.u, tau, dt / 2.0, cfg_.polymer);
  advect(s.psi, u_mid, dt / 2.0);
  fp_step(s.psi, DragField::from_velocity(u_mid, cfg_.polymer.drag), *half_,
          dt);
  advect(s.psi, u_mid, dt / 2.0);
  const SpectralField tau2 = assemble_stress(s.psi, cfg_.polymer.epsilon);
  s.u = ns_step(u_mid, tau2, dt / 2.0, cfg_.polymer);
}

void CoupledSolver::step(State& s) const {
  if (s.psi.grid().nodes() != grid_->nodes() || s.u.n() != cfg_.n ||
      s.psi.n() != cfg_.n)
    throw std::invalid_argument("CoupledSolver::step: state grid mismatch");
  try {
    if (cfg_.splitting == Splitting::kLie)
      lie_step(s);
    else
      strang_step(s);
  } catch (const StabilityError& e) {
    throw StabilityError("t=" + std::to_string(s.t) + ": " + e.what());
  } catch (const NumericalBreakdown& e) {
    throw NumericalBreakdown("t=" + std::to_string(s.t) + ": " + e.what());
  }
  s.t += cfg_.dt;
}

namespace {

void record_snapshot(RunRecord& rec, const State& s, const BesovParams& bp) {
  rec.times.push_back(s.t);
  rec.u_blocks.push_back(block_lp_norms(s.u, bp.p));
  rec.u_besov.push_back(compose_block_norms(rec.u_blocks.back(), bp.s, bp.r));
  rec.psi_blocks.push_back(block_lp_norms(s.psi, bp.p));
  rec.psi_besov.push_back(
      compose_block_norms(rec.psi_blocks.back(), bp.s - 1.0, bp.r));
  rec.energy.push_back(s.u.l2_norm());
  rec.mass.push_back(s.psi.global_mass());
  rec.entropy.push_back(entropy_moment(s.psi, bp.p));
}

}  // namespace

RunRecord CoupledSolver::run(State initial) const {
  State s = std::move(initial);
  RunRecord rec;
  rec.snapshot_dt = cfg_.dt * cfg_.snapshot_stride;
  record_snapshot(rec, s, cfg_.besov);

  const double initial_size = rec.u_besov[0] + rec.psi_besov[0];
  const double limit = 1e3 * std::max(initial_size, 1e-6);

  const int m = cfg_.steps();
  for (int i = 0; i < m; ++i) {
    step(s);
    if ((i + 1) % cfg_.snapshot_stride != 0) continue;
    record_snapshot(rec, s, cfg_.besov);
    if (rec.u_besov.back() + rec.psi_besov.back() > limit) {
      rec.aborted = true;
      rec.final_state = std::move(s);
      throw AbortedRun(
          "run aborted at t=" + std::to_string(rec.final_state.t) +
              ": diagnostic norm exceeded 1e3 x initial",
          std::move(rec));
    }
  }
  rec.final_state = std::move(s);
  return rec;
}

void save_checkpoint(const std::string& path, const State& s) {
  const std::string u_name = path + ".u";
  const std::string psi_name = path + ".psi";
  s.u.save(u_name, s.t);
  s.psi.save(psi_name, s.t);
  auto base = [](const std::string& p) {
    const auto cut = p.find_last_of('/');
    return cut == std::string::npos ? p : p.substr(cut + 1);
  };
  nlohmann::json manifest = {{"version", 1},
                             {"t", s.t},
                             {"u", base(u_name)},
                             {"psi", base(psi_name)}};
  io::write_text_file(path, manifest.dump(2) + "\n");
}

State load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  nlohmann::json manifest;
  in >> manifest;
  if (manifest.value("version", 0) != 1)
    throw std::runtime_error("load_checkpoint: unsupported version in " + path);
  const auto cut = path.find_last_of('/');
  const std::string dir = cut == std::string::npos ? "" : path.substr(0, cut);
  auto resolve = [&](const std::string& name) {
    return dir.empty() ? name : io::join_path(dir, name);
  };
  auto [u, tu] = SpectralField::load(resolve(manifest.at("u")));
  auto [psi, tp] = Distribution::load(resolve(manifest.at("psi")));
  const double t = manifest.at("t");
  if (std::abs(tu - t) > 1e-12 || std::abs(tp - t) > 1e-12)
    throw std::runtime_error("load_checkpoint: snapshot times disagree");
  return State{std::move(u), std::move(psi), t};
}

DependenceReport continuous_dependence(const State& a, const State& b,
                                       const SolverConfig& cfg, double nu) {
  SolverConfig c = cfg;
  c.polymer = cfg.polymer.at_nu(nu);
  const CoupledSolver solver(c);
  const BesovParams bu = c.besov.shifted(-1.0);
  const BesovParams bpsi = c.besov.shifted(-2.0);

  State sa = a;
  State sb = b;
  DependenceReport rep;
  auto measure = [&](double& out_u, double& out_psi) {
    const SpectralField du = sa.u - sb.u;
    out_u = std::max(out_u, besov_norm(du, bu));
    Distribution dpsi = sa.psi;
    auto vals = dpsi.values();
    auto other = sb.psi.values();
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] -= other[i];
    out_psi = std::max(out_psi, besov_lp_norm(dpsi, bpsi));
  };
  measure(rep.input_u, rep.input_psi);
  rep.output_u = rep.input_u;
  rep.output_psi = rep.input_psi;

  const int m = c.steps();
  for (int i = 0; i < m; ++i) {
    solver.step(sa);
    solver.step(sb);
    if ((i + 1) % c.snapshot_stride == 0) measure(rep.output_u, rep.output_psi);
  }
  return rep;
}

}  // namespace fene
