#include "fene/config_grid.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fene/errors.hpp"

namespace fene {

PolymerParams PolymerParams::at_nu(double nu) const {
  PolymerParams p = *this;
  if (nu < 0.0) throw std::invalid_argument("at_nu: negative viscosity");
  p.re = nu == 0.0 ? std::numeric_limits<double>::infinity() : epsilon / nu;
  return p;
}

void PolymerParams::validate() const {
  if (!(k > 0.0)) throw std::invalid_argument("PolymerParams: k must be > 0");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("PolymerParams: epsilon must lie in (0, 1)");
  if (!(re > 0.0)) throw std::invalid_argument("PolymerParams: re must be > 0");
  if (nu() > 1.0)
    throw std::invalid_argument("PolymerParams: nu = epsilon/re exceeds 1");
}

ConfigGrid::ConfigGrid(int n_r, int n_theta, double k)
    : n_r_(n_r), n_theta_(n_theta), k_(k) {
  if (n_r < 4) throw std::invalid_argument("ConfigGrid: n_r must be >= 4");
  if (n_theta < 8 || n_theta % 2 != 0)
    throw std::invalid_argument("ConfigGrid: n_theta must be even and >= 8");
  if (!(k > 0.0)) throw std::invalid_argument("ConfigGrid: k must be > 0");

  const double tau = 2.0 * std::numbers::pi;
  dr_ = 1.0 / n_r;
  dtheta_ = tau / n_theta;
  z_cont_ = std::numbers::pi / (k + 1.0);

  r_.resize(n_r);
  w_.resize(n_r);
  psi_inf_.resize(n_r);
  wpsi_.resize(n_r);
  for (int i = 0; i < n_r; ++i) {
    r_[i] = (i + 0.5) * dr_;
    w_[i] = r_[i] * dr_ * dtheta_;
  }

  // Quadrature mass of the raw equilibrium profile, then renormalize so
  // the discrete mass is exactly one.
  double raw = 0.0;
  for (int i = 0; i < n_r; ++i)
    raw += n_theta * w_[i] * std::pow(1.0 - r_[i] * r_[i], k);
  z_disc_ = raw;
  for (int i = 0; i < n_r; ++i) {
    psi_inf_[i] = std::pow(1.0 - r_[i] * r_[i], k) / raw;
    wpsi_[i] = w_[i] * psi_inf_[i];
  }

  cos_.resize(n_theta);
  sin_.resize(n_theta);
  cos_f_.resize(n_theta);
  sin_f_.resize(n_theta);
  for (int m = 0; m < n_theta; ++m) {
    const double th = (m + 0.5) * dtheta_;
    cos_[m] = std::cos(th);
    sin_[m] = std::sin(th);
    cos_f_[m] = std::cos((m + 1.0) * dtheta_);
    sin_f_[m] = std::sin((m + 1.0) * dtheta_);
  }

  wpsi_node_.resize(nodes());
  for (int i = 0; i < n_r; ++i)
    for (int m = 0; m < n_theta; ++m)
      wpsi_node_[static_cast<size_t>(i) * n_theta + m] = wpsi_[i];

  psi_face_.resize(n_r);
  c_r_.resize(n_r);
  c_th_.resize(n_r);
  for (int i = 0; i < n_r; ++i) {
    const double rf = (i + 1.0) * dr_;
    psi_face_[i] = std::pow(std::max(0.0, 1.0 - rf * rf), k) / raw;
    c_r_[i] = psi_face_[i] * rf * dtheta_ / dr_;
    c_th_[i] = psi_inf_[i] * dr_ / (r_[i] * dtheta_);
  }
}

double ConfigGrid::dirichlet_form(std::span<const double> h) const {
  double total = 0.0;
  for (int i = 0; i + 1 < n_r_; ++i) {
    const double* lo = h.data() + static_cast<size_t>(i) * n_theta_;
    const double* hi = lo + n_theta_;
    double s = 0.0;
    for (int m = 0; m < n_theta_; ++m) {
      const double d = hi[m] - lo[m];
      s += d * d;
    }
    total += c_r_[i] * s;
  }
  for (int i = 0; i < n_r_; ++i) {
    const double* gi = h.data() + static_cast<size_t>(i) * n_theta_;
    double s = 0.0;
    for (int m = 0; m < n_theta_; ++m) {
      const double d = gi[(m + 1) % n_theta_] - gi[m];
      s += d * d;
    }
    total += c_th_[i] * s;
  }
  return total;
}

double ConfigGrid::mass(std::span<const double> g) const {
  double s = 0.0;
  for (int i = 0; i < n_r_; ++i) {
    const double* gi = g.data() + static_cast<size_t>(i) * n_theta_;
    double ring = 0.0;
    for (int m = 0; m < n_theta_; ++m) ring += gi[m];
    s += wpsi_[i] * ring;
  }
  return s;
}

double ConfigGrid::weighted_p_moment(std::span<const double> g, double p) const {
  if (!(p >= 1.0)) throw std::invalid_argument("weighted_p_moment: p < 1");
  double s = 0.0;
  if (p == 2.0) {
    for (int i = 0; i < n_r_; ++i) {
      const double* gi = g.data() + static_cast<size_t>(i) * n_theta_;
      double ring = 0.0;
      for (int m = 0; m < n_theta_; ++m) ring += gi[m] * gi[m];
      s += wpsi_[i] * ring;
    }
  } else {
    for (int i = 0; i < n_r_; ++i) {
      const double* gi = g.data() + static_cast<size_t>(i) * n_theta_;
      double ring = 0.0;
      for (int m = 0; m < n_theta_; ++m)
        ring += std::pow(std::abs(gi[m]), p);
      s += wpsi_[i] * ring;
    }
  }
  return s;
}

double ConfigGrid::weighted_lp_norm(std::span<const double> g, double p) const {
  return std::pow(weighted_p_moment(g, p), 1.0 / p);
}

std::array<double, 3> ConfigGrid::stress(std::span<const double> g,
                                         double eps) const {
  // tau_ab = eps * int 2k R_a R_b (1-r^2)^(k-1) g dR / Z. The 1/(1-r^2)
  // factor of grad U is cancelled against psi_inf analytically, so the
  // sampled weight is the smooth profile (1-r^2)^(k-1) over the exact
  // normalizer Z = pi/(k+1).
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < n_r_; ++i) {
    const double* gi = g.data() + static_cast<size_t>(i) * n_theta_;
    const double r2 = r_[i] * r_[i];
    const double coef =
        2.0 * k_ * w_[i] * std::pow(1.0 - r2, k_ - 1.0) * r2 / z_cont_;
    double axx = 0.0, axy = 0.0, ayy = 0.0;
    for (int m = 0; m < n_theta_; ++m) {
      const double c = cos_[m], s = sin_[m];
      axx += c * c * gi[m];
      axy += c * s * gi[m];
      ayy += s * s * gi[m];
    }
    sxx += coef * axx;
    sxy += coef * axy;
    syy += coef * ayy;
  }
  return {eps * sxx, eps * sxy, eps * syy};
}

std::pair<double, double> ConfigGrid::z_functional(std::span<const double> g,
                                                   double p) const {
  if (!(p >= 1.0)) throw std::invalid_argument("z_functional: p < 1");
  if (!((p - 1.0) * k_ > 1.0))
    throw HypothesisViolation(
        "z_functional: requires (p-1)k > 1, got (p-1)k = " +
        std::to_string((p - 1.0) * k_));
  // The integrand psi/(1-r) is sampled with the analytic normalizer: the
  // profile (1-r^2)^k/(1-r) = (1-r)^(k-1)(1+r)^k is smooth for k >= 1.
  double lhs = 0.0;
  for (int i = 0; i < n_r_; ++i) {
    const double* gi = g.data() + static_cast<size_t>(i) * n_theta_;
    const double r2 = r_[i] * r_[i];
    const double coef = w_[i] * std::pow(1.0 - r2, k_) /
                        (z_cont_ * (1.0 - r_[i]));
    double ring = 0.0;
    for (int m = 0; m < n_theta_; ++m) ring += std::abs(gi[m]);
    lhs += coef * ring;
  }
  return {std::pow(lhs, p), weighted_p_moment(g, p)};
}

}  // namespace fene
