#ifndef FENE_BESOV_HPP
#define FENE_BESOV_HPP

#include <span>
#include <vector>

#include "fene/distribution.hpp"
#include "fene/dyadic.hpp"
#include "fene/spectral_field.hpp"

namespace fene {

struct BesovParams {
  double s = 2.0;
  double p = 2.0;
  double r = 2.0;

  BesovParams() = default;
  BesovParams(double s_, double p_, double r_) : s(s_), p(p_), r(r_) {}

  /// Throws std::invalid_argument unless 1 <= p < inf and 1 <= r < inf.
  void validate() const;
  /// Same parameters with the regularity index shifted by ds.
  BesovParams shifted(double ds) const { return {s + ds, p, r}; }
};

/// Frequency block j of a field, j in [-1, j_max]; block -1 is the
/// low-frequency ball.
SpectralField lp_block(const SpectralField& f, int j);
/// Partial sum of blocks below j: multiplier chi(xi / 2^j). j in
/// [0, j_max + 1]; the top value is the identity on the lattice.
SpectralField low_freq(const SpectralField& f, int j);

/// Block operators acting on the x-dependence of a distribution, plane
/// by plane.
Distribution lp_block(const Distribution& g, int j);
Distribution low_freq(const Distribution& g, int j);

/// Rectangle-rule L^p norms of every block, index 0 holding block -1.
std::vector<double> block_lp_norms(const SpectralField& f, double p);
/// Joint norms ||Delta_j g||_{L^p_x(L^p_R weighted)} of every block.
std::vector<double> block_lp_norms(const Distribution& g, double p);

/// l^r composition ( sum_j (2^{js} b_j)^r )^{1/r} with j = -1 first;
/// r = inf takes the max.
double compose_block_norms(std::span<const double> block_norms, double s,
                           double r);

double besov_norm(const SpectralField& f, const BesovParams& bp);
double besov_lp_norm(const Distribution& g, const BesovParams& bp);

/// Time-inside-the-blocks norm: rows of series are per-snapshot block
/// norms on a uniform dt grid covering [0, T]. Each block's series is
/// reduced by the L^rho trapezoid rule in time (max for rho = inf), then
/// composed across blocks with (bp.s, bp.r). Needs at least two rows for
/// finite rho.
double chemin_lerner_norm(const std::vector<std::vector<double>>& series,
                          double dt, double rho, const BesovParams& bp);

/// Odd power sign(x) |x|^q.
double signed_power(double x, double q);

/// Entropy dissipation of one snapshot, per block: the values
/// int_x int_R psi_inf |grad_R (Delta_j g)^{p/2}|^2, R-gradient by the
/// grid's face-difference form, the power taken with signed_power.
std::vector<double> dissipation_blocks(const Distribution& g, double p);

/// ( sum_j (2^{js} (int_0^T d_j dt)^{1/p})^r )^{1/r} from per-snapshot
/// dissipation_blocks rows (trapezoid in time).
double e_tilde_from_series(const std::vector<std::vector<double>>& series,
                           double dt, const BesovParams& bp);
double e_tilde_norm(std::span<const Distribution> history, double dt,
                    const BesovParams& bp);

/// Advection commutator v . grad(Delta_j g) - Delta_j(v . grad g), x
/// derivatives spectral, products on the grid. Requires div v = 0.
Distribution commutator(const SpectralField& v, const Distribution& g, int j);

}  // namespace fene

#endif
