#ifndef FENE_COUPLED_HPP
#define FENE_COUPLED_HPP

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "fene/besov.hpp"
#include "fene/config_grid.hpp"
#include "fene/distribution.hpp"
#include "fene/fokker_planck.hpp"
#include "fene/spectral_field.hpp"

namespace fene {

enum class Splitting { kLie, kStrang };

struct SolverConfig {
  int n = 64;
  int n_r = 32;
  int n_theta = 16;
  double dt = 1e-3;
  double t_end = 0.5;
  PolymerParams polymer;
  BesovParams besov;
  int snapshot_stride = 10;
  Splitting splitting = Splitting::kStrang;

  /// t_end / dt, which must be a whole number of steps and a whole
  /// number of snapshot strides.
  int steps() const;
  /// Throws std::invalid_argument on inconsistent values; n must be a
  /// power of two >= 8 for the dyadic diagnostics.
  void validate() const;
  std::shared_ptr<const ConfigGrid> make_grid() const;
};

struct State {
  SpectralField u;
  Distribution psi;
  double t = 0.0;
};

/// Fluid at rest, configuration density at equilibrium.
State rest_state(const SolverConfig& cfg);

/// Throws HypothesisViolation unless u is divergence-free (1e-10,
/// relative), both fields are finite, and the per-x mass is positive.
void check_state(const State& s);

/// Snapshot diagnostics of one integration, on the uniform time grid
/// t = 0, snapshot_dt, ..., t_end.
struct RunRecord {
  std::vector<double> times;
  std::vector<double> u_besov;    // B^s_{p,r}
  std::vector<double> psi_besov;  // B^{s-1}_{p,r} of g, weighted L^p in R
  std::vector<double> energy;     // L^2 norm of u
  std::vector<double> mass;       // global configuration mass
  std::vector<double> entropy;    // weighted L^p moment of g
  std::vector<std::vector<double>> u_blocks;
  std::vector<std::vector<double>> psi_blocks;
  double snapshot_dt = 0.0;
  bool aborted = false;
  State final_state;
};

/// Blow-up stop: a diagnostic norm grew past 10^3 times its initial
/// value. Carries what was recorded up to the stop.
class AbortedRun : public std::runtime_error {
 public:
  AbortedRun(const std::string& what, RunRecord partial);
  const RunRecord& partial() const { return *partial_; }

 private:
  std::shared_ptr<RunRecord> partial_;
};

/// The full initial-value problem: fluid step with the stress assembled
/// from the current density, x-advection of the density by the updated
/// velocity, then the configuration-space step, composed per the
/// configured splitting. One solver instance is immutable and serves any
/// number of states on its grids.
class CoupledSolver {
 public:
  explicit CoupledSolver(const SolverConfig& cfg);

  const SolverConfig& config() const { return cfg_; }
  const std::shared_ptr<const ConfigGrid>& grid() const { return grid_; }

  /// One splitting step in place; stability errors are annotated with
  /// the state time.
  void step(State& s) const;

  /// Integrates to t_end recording snapshot diagnostics. Throws
  /// AbortedRun on blow-up.
  RunRecord run(State initial) const;

 private:
  void lie_step(State& s) const;
  void strang_step(State& s) const;

  SolverConfig cfg_;
  std::shared_ptr<const ConfigGrid> grid_;
  std::shared_ptr<const FpPropagator> half_;
};

/// Manifest plus one snapshot file per field, written next to the
/// manifest path; resumable with load_checkpoint.
void save_checkpoint(const std::string& path, const State& s);
State load_checkpoint(const std::string& path);

struct DependenceReport {
  double input_u = 0.0;    // B^{s-1} distance of the velocity data
  double input_psi = 0.0;  // B^{s-2} (weighted L^p) distance of the density data
  double output_u = 0.0;   // sup over snapshots of the B^{s-1} distance
  double output_psi = 0.0;
};

/// Runs both states in lockstep at the given viscosity and measures how
/// the solution distance compares with the data distance.
DependenceReport continuous_dependence(const State& a, const State& b,
                                       const SolverConfig& cfg, double nu);

/// Successive linearizations: iterate n+1 is advected and forced by the
/// stored trajectory of iterate n and starts from the low-frequency
/// parts S_{n+2} of the data; iterate 0 is the constant-in-time S_1
/// data. The fixed point of the map is exactly the kLie step path.
struct PicardResult {
  std::vector<double> a_seq;  // velocity increments, sup-in-time B^{s-1}
  std::vector<double> b_seq;  // density increments, sup-in-time B^{s-2}
  State final_state;          // last iterate at t_end
};
PicardResult picard_run(const SpectralField& u0, const Distribution& psi0,
                        const SolverConfig& cfg, int n_iters,
                        int psi_snapshots = 5);

}  // namespace fene

#endif
