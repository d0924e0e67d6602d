#ifndef FENE_CONFIG_GRID_HPP
#define FENE_CONFIG_GRID_HPP

#include <array>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

namespace fene {

enum class DragType { kFull, kCorotational };

/// Model parameters. nu = epsilon/re; re may be +infinity, which is the
/// inviscid member of the family: both the viscous term and the stress
/// feedback coefficient (1-epsilon)/re vanish together.
struct PolymerParams {
  double k = 2.0;
  double epsilon = 0.5;
  double re = 0.5;
  DragType drag = DragType::kCorotational;

  double nu() const { return std::isinf(re) ? 0.0 : epsilon / re; }
  double stress_coef() const {
    return std::isinf(re) ? 0.0 : (1.0 - epsilon) / re;
  }

  /// Same parameters with re chosen so that nu() == nu; nu == 0 sets
  /// re = +infinity.
  PolymerParams at_nu(double nu) const;

  /// Throws std::invalid_argument outside k > 0, 0 < epsilon < 1,
  /// re > 0, nu <= 1.
  void validate() const;
};

/// Cell-centered polar mesh on the unit disk carrying the equilibrium
/// weight. r_i = (i+1/2)/n_r, theta_m = (m+1/2) * 2pi/n_theta, cell
/// quadrature weight r_i dr dtheta (midpoint rule). The sampled
/// equilibrium (1-r^2)^k is renormalized so its discrete mass is exactly
/// 1; psi values are represented throughout as g = psi / psi_inf.
///
/// Slab layout: all per-x configuration data is indexed node = i*n_theta+m.
class ConfigGrid {
 public:
  ConfigGrid(int n_r, int n_theta, double k);

  int n_r() const { return n_r_; }
  int n_theta() const { return n_theta_; }
  int nodes() const { return n_r_ * n_theta_; }
  double k() const { return k_; }
  /// True when the other grid has the same shape and potential strength,
  /// so precomputed operators built on one apply verbatim to the other.
  bool matches(const ConfigGrid& other) const {
    return n_r_ == other.n_r_ && n_theta_ == other.n_theta_ && k_ == other.k_;
  }
  double dr() const { return dr_; }
  double dtheta() const { return dtheta_; }
  double r(int i) const { return r_[i]; }
  double cos_th(int m) const { return cos_[m]; }
  double sin_th(int m) const { return sin_[m]; }
  /// Trig at the angular face between cells m and m+1 (angle (m+1) dtheta).
  double cos_face(int m) const { return cos_f_[m]; }
  double sin_face(int m) const { return sin_f_[m]; }

  /// Quadrature weight of one cell in ring i.
  double cell_weight(int i) const { return w_[i]; }
  /// Renormalized equilibrium sample on ring i.
  double psi_inf(int i) const { return psi_inf_[i]; }
  /// cell_weight(i) * psi_inf(i), the weighted quadrature mass of a cell.
  double wpsi(int i) const { return wpsi_[i]; }
  /// Same mass per node (size nodes()), for slab loops.
  const std::vector<double>& wpsi_node() const { return wpsi_node_; }

  /// Renormalized equilibrium at the radial face r = (i+1)/n_r,
  /// i in [0, n_r); the outer face value is exactly 0.
  double psi_inf_face(int i) const { return psi_face_[i]; }
  /// Flux coefficient of the radial face between rings i and i+1:
  /// psi_inf_face(i) * r_face * dtheta / dr. The outer face (i = n_r-1)
  /// returns 0, which is the zero-flux boundary condition.
  double radial_face_coef(int i) const { return c_r_[i]; }
  /// Flux coefficient of either angular face of a ring-i cell:
  /// psi_inf(i) * dr / (r_i * dtheta).
  double theta_face_coef(int i) const { return c_th_[i]; }

  /// Discrete int psi_inf |grad_R h|^2 dR of a slab: the sum of
  /// face_coef * (face difference)^2 over all interior faces. Identical
  /// face coefficients drive the diffusion operator, so this form is its
  /// exact integration by parts.
  double dirichlet_form(std::span<const double> h) const;

  /// Continuum normalizer int_B (1-|R|^2)^k dR = pi/(k+1).
  double z_cont() const { return z_cont_; }
  /// Quadrature value of the same integral before renormalization.
  double z_disc() const { return z_disc_; }
  /// Continuum equilibrium density (1-r^2)^k / z_cont().
  double psi_inf_cont(double radius) const {
    return std::pow(1.0 - radius * radius, k_) / z_cont_;
  }

  /// int psi dR of a g-slab (size nodes()).
  double mass(std::span<const double> g) const;

  /// (int psi_inf |g|^p dR)^(1/p).
  double weighted_lp_norm(std::span<const double> g, double p) const;
  /// int psi_inf |g|^p dR without the root.
  double weighted_p_moment(std::span<const double> g, double p) const;

  /// Polymer stress of one slab: eps * int R (x) grad U psi dR, returned
  /// as {tau_xx, tau_xy, tau_yy}. The integrand 2k R_i R_j (1-r^2)^(k-1) g
  /// carries no singular factor.
  std::array<double, 3> stress(std::span<const double> g, double eps) const;

  /// Weighted distance bound pair for the singular functional
  /// z(R) = 1 - |R|: returns {(int |psi|/z dR)^p, int psi_inf |g|^p dR}.
  /// Throws HypothesisViolation unless (p-1)k > 1.
  std::pair<double, double> z_functional(std::span<const double> g,
                                         double p) const;

 private:
  int n_r_ = 0, n_theta_ = 0;
  double k_ = 0.0, dr_ = 0.0, dtheta_ = 0.0;
  double z_cont_ = 0.0, z_disc_ = 0.0;
  std::vector<double> r_, w_, psi_inf_, wpsi_, cos_, sin_, cos_f_, sin_f_;
  std::vector<double> wpsi_node_, psi_face_, c_r_, c_th_;
};

}  // namespace fene

#endif
