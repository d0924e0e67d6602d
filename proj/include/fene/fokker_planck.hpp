#ifndef FENE_FOKKER_PLANCK_HPP
#define FENE_FOKKER_PLANCK_HPP

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "fene/config_grid.hpp"
#include "fene/distribution.hpp"
#include "fene/spectral_field.hpp"

namespace fene {

/// Velocity-gradient coupling sigma(u) sampled per x-node, one array per
/// tensor entry (s_ab = d u_a / d x_b, or its antisymmetric part).
struct DragField {
  int n = 0;
  DragType type = DragType::kCorotational;
  std::vector<double> s00, s01, s10, s11;

  static DragField zero(int n);
  /// x-independent tensor {s00, s01, s10, s11}, symmetrized per type.
  static DragField uniform(int n, const std::array<double, 4>& s,
                           DragType type);
  /// Spectral gradient of a two-component velocity field (Nyquist modes
  /// dropped), then the type's symmetrization.
  static DragField from_velocity(const SpectralField& u, DragType type);

  std::int64_t size() const { return static_cast<std::int64_t>(n) * n; }
  /// Max over x of the Frobenius norm, an operator-norm bound for CFL use.
  double max_norm() const;
  double antisymmetry_defect() const;
};

/// Exact propagator of the configuration diffusion d_t g =
/// (1/(2 psi_inf)) div_R(psi_inf grad_R g) over a fixed interval dt:
/// angular modes are separated in the orthonormal trigonometric basis,
/// each mode's radial operator is symmetrized and eigendecomposed once,
/// and the dense per-mode matrix exponentials are stored. Application is
/// unconditionally stable, preserves the constant slab exactly, and
/// conserves per-x mass to round-off (the zero mode is pinned onto its
/// analytic null direction).
class FpPropagator {
 public:
  FpPropagator(std::shared_ptr<const ConfigGrid> grid, double dt);

  const ConfigGrid& grid() const { return *grid_; }
  double dt() const { return dt_; }

  /// Advances X slabs in place; tile layout tile[node * X + x].
  void apply_batch(double* tile, int X) const;
  void apply_slab(std::span<double> slab) const;

 private:
  std::shared_ptr<const ConfigGrid> grid_;
  double dt_ = 0.0;
  std::vector<double> q_, qt_;  // n_theta x n_theta basis and transpose
  std::vector<double> prop_;    // per angular mode, n_r x n_r row-major
  std::vector<int> mode_of_col_;
};

/// Tendencies on one x-slab (node-major), the finite-volume reference
/// forms. sigma = {s00, s01, s10, s11} at that x.
void diffusion_tendency(const ConfigGrid& grid, std::span<const double> g,
                        std::span<double> out);
void drag_tendency(const ConfigGrid& grid, std::span<const double> g,
                   const std::array<double, 4>& sigma, std::span<double> out);
void fp_rhs(const ConfigGrid& grid, std::span<const double> g,
            const std::array<double, 4>& sigma, std::span<double> out);

/// One configuration-space step at every x: half diffusion, one Heun
/// step of the drag transport, half diffusion. half must be built for
/// dt/2 on g's grid. Throws StabilityError when dt * sigma.max_norm()
/// exceeds half the smallest mesh spacing.
void fp_step(Distribution& g, const DragField& sigma, const FpPropagator& half,
             double dt);

/// Advances d_t psi + u . grad_x psi = 0 over dt with a third-order
/// explicit scheme, spectral x-derivatives, and 2/3-rule dealiasing of
/// the products. Throws StabilityError when max|u| dt n / (2 pi) > 0.5.
void advect(Distribution& g, const SpectralField& u, double dt);

/// int_x int_R psi_inf |g|^p, the Lebesgue moment tracked by the entropy
/// estimates.
double entropy_moment(const Distribution& g, double p);
/// int_x int_R psi_inf |grad_R g^{p/2}|^2 with the signed power, by the
/// grid's face-difference form.
double entropy_dissipation(const Distribution& g, double p);

/// Moment and dissipation series of a stored history.
struct EntropyReport {
  std::vector<double> moment;
  std::vector<double> dissipation;
};
EntropyReport entropy_report(std::span<const Distribution> history, double p);

}  // namespace fene

#endif
