#ifndef FENE_FLUID_HPP
#define FENE_FLUID_HPP

#include "fene/config_grid.hpp"
#include "fene/distribution.hpp"
#include "fene/spectral_field.hpp"

namespace fene {

/// Removes the gradient part mode by mode; the zero mode is untouched.
void leray_project(SpectralField& u);

/// Divergence of a symmetric tensor field stored as (xx, xy, yy).
SpectralField tensor_divergence(const SpectralField& tau);

/// Polymer stress at every x-node as a 3-component (xx, xy, yy) field.
SpectralField assemble_stress(const Distribution& g, double eps);

/// Projected tendency of the momentum equation without its viscous part:
/// Leray(-dealias(u.grad u) + stress_coef div tau). Either term can be
/// toggled off; tau is ignored when stress is off or the coefficient is 0.
SpectralField ns_rhs(const SpectralField& u, const SpectralField& tau,
                     const PolymerParams& params, bool nonlinear = true,
                     bool stress = true);

/// Pressure recovered from the forces: P with grad P equal to the
/// non-solenoidal part of (-dealias(u.grad u) + stress_coef div tau +
/// f_ext); f_ext may be null.
SpectralField pressure(const SpectralField& u, const SpectralField& tau,
                       const SpectralField* f_ext,
                       const PolymerParams& params);

/// One explicit third-order step of the projected equation composed with
/// the exact viscous factor exp(-nu |k|^2 dt); nu = 0 is the inviscid
/// step of the same path. The mean mode is pinned to zero. Throws
/// StabilityError on the advective CFL, NumericalBreakdown on non-finite
/// output.
SpectralField ns_step(const SpectralField& u, const SpectralField& tau,
                      double dt, const PolymerParams& params,
                      bool nonlinear = true, bool stress = true);

/// The velocity fields whose samples advect each of the three internal
/// tendency evaluations of a step.
struct StepStages {
  SpectralField s0, s1, s2;
};

/// ns_step linearized around a stored trajectory: stage q advects the
/// evolving state with wind's stage-q field instead of the state itself,
/// so iterating with wind = own stages reproduces ns_step exactly. When
/// record is non-null the call's own stages are written there for use as
/// the next wind. wind == nullptr self-advects.
SpectralField ns_step_driven(const SpectralField& u, const StepStages* wind,
                             const SpectralField& tau, double dt,
                             const PolymerParams& params, StepStages* record);

/// One step of d_t f + v.grad f - nu Lap f = src for a scalar field, same
/// scheme as ns_step without the projection.
SpectralField transport_diffusion_step(const SpectralField& f,
                                       const SpectralField& v,
                                       const SpectralField& src, double nu,
                                       double dt);

/// The closed-form swirl (A e^{-2 nu t} sin x cos y, -A e^{-2 nu t}
/// cos x sin y) sampled into coefficients.
SpectralField taylor_green(int n, double amplitude, double t, double nu);
/// Its pressure -A(t)^2 (cos 2x + cos 2y) / 4.
SpectralField taylor_green_pressure(int n, double amplitude, double t,
                                    double nu);

}  // namespace fene

#endif
