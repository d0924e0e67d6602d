#include "fene/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "fene/errors.hpp"
#include "fene/fft.hpp"
#include "fene/parallel.hpp"

namespace fene {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;
constexpr int kTile = 64;

/// Fused 2/3-rule and derivative multipliers on the n-by-n mode lattice.
struct Multipliers {
  std::vector<double> keep, mkx, mky;

  explicit Multipliers(int n)
      : keep(static_cast<std::int64_t>(n) * n),
        mkx(keep.size()),
        mky(keep.size()) {
    const int kmax = (n - 1) / 3;
    for (int iy = 0; iy < n; ++iy) {
      const int wy = wavenumber(iy, n);
      for (int ix = 0; ix < n; ++ix) {
        const int wx = wavenumber(ix, n);
        const std::int64_t i = static_cast<std::int64_t>(iy) * n + ix;
        const bool inside = std::abs(wx) <= kmax && std::abs(wy) <= kmax;
        keep[i] = inside ? 1.0 : 0.0;
        mkx[i] = inside ? wx : 0.0;
        mky[i] = inside ? wy : 0.0;
      }
    }
  }
};

/// Physical samples of the band-limited part of a 2-component field.
void masked_samples(const SpectralField& u, const Multipliers& mult,
                    std::vector<double>& vx, std::vector<double>& vy) {
  const int n = u.n();
  const std::int64_t nn = u.modes_per_comp();
  const Fft2d& fft = fft_for(n);
  std::vector<cplx> buf(nn);
  auto u0 = u.comp(0);
  auto u1 = u.comp(1);
  for (std::int64_t i = 0; i < nn; ++i)
    buf[i] = mult.keep[i] * (u0[i] + cplx(0.0, 1.0) * u1[i]);
  fft.backward(buf.data());
  vx.resize(nn);
  vy.resize(nn);
  for (std::int64_t i = 0; i < nn; ++i) {
    vx[i] = buf[i].real();
    vy[i] = buf[i].imag();
  }
}

/// Coefficients of dealias(v . grad f), component by component; the
/// advecting samples must already be band-limited.
SpectralField dealiased_advection(const std::vector<double>& vx,
                                  const std::vector<double>& vy,
                                  const SpectralField& f,
                                  const Multipliers& mult) {
  const int n = f.n();
  const int nc = f.components();
  const std::int64_t nn = f.modes_per_comp();
  const Fft2d& fft = fft_for(n);
  const double inv_nn = 1.0 / static_cast<double>(nn);

  SpectralField out(n, nc);
  std::vector<std::vector<double>> w(nc, std::vector<double>(nn));
  std::vector<cplx> buf(nn);

  for (int c = 0; c < nc; ++c) {
    auto fc = f.comp(c);
    for (std::int64_t i = 0; i < nn; ++i)
      buf[i] = fc[i] * cplx(-mult.mky[i], mult.mkx[i]);
    fft.backward(buf.data());
    for (std::int64_t i = 0; i < nn; ++i)
      w[c][i] = vx[i] * buf[i].real() + vy[i] * buf[i].imag();
  }

  for (int c = 0; c < nc; c += 2) {
    const int d = std::min(c + 1, nc - 1);
    if (d != c) {
      for (std::int64_t i = 0; i < nn; ++i)
        buf[i] = cplx(w[c][i], w[d][i]);
      fft.forward(buf.data());
      auto oc = out.comp(c);
      auto od = out.comp(d);
      for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
          const std::int64_t i = static_cast<std::int64_t>(iy) * n + ix;
          const std::int64_t j =
              static_cast<std::int64_t>((n - iy) % n) * n + (n - ix) % n;
          const cplx here = buf[i];
          const cplx mirror = std::conj(buf[j]);
          const double m = 0.5 * mult.keep[i] * inv_nn;
          oc[i] = m * (here + mirror);
          od[i] = m * cplx(0.0, -1.0) * (here - mirror);
        }
      }
    } else {
      for (std::int64_t i = 0; i < nn; ++i) buf[i] = w[c][i];
      fft.forward(buf.data());
      auto oc = out.comp(c);
      for (std::int64_t i = 0; i < nn; ++i)
        oc[i] = mult.keep[i] * inv_nn * buf[i];
    }
  }
  return out;
}

void check_velocity(const SpectralField& u, const char* who) {
  if (u.components() != 2)
    throw std::invalid_argument(std::string(who) +
                                ": velocity must have two components");
  if (u.n() < 4)
    throw std::invalid_argument(std::string(who) + ": grid too small");
}

}  // namespace

void leray_project(SpectralField& u) {
  check_velocity(u, "leray_project");
  const int n = u.n();
  auto u0 = u.comp(0);
  auto u1 = u.comp(1);
  for (int iy = 0; iy < n; ++iy) {
    const double ky = wavenumber(iy, n);
    for (int ix = 0; ix < n; ++ix) {
      const double kx = wavenumber(ix, n);
      const double k2 = kx * kx + ky * ky;
      if (k2 == 0.0) continue;
      const std::int64_t i = static_cast<std::int64_t>(iy) * n + ix;
      const cplx d = (kx * u0[i] + ky * u1[i]) / k2;
      u0[i] -= kx * d;
      u1[i] -= ky * d;
    }
  }
}

SpectralField tensor_divergence(const SpectralField& tau) {
  if (tau.components() != 3)
    throw std::invalid_argument(
        "tensor_divergence: expected (xx, xy, yy) components");
  const int n = tau.n();
  SpectralField out(n, 2);
  auto txx = tau.comp(0);
  auto txy = tau.comp(1);
  auto tyy = tau.comp(2);
  auto o0 = out.comp(0);
  auto o1 = out.comp(1);
  for (int iy = 0; iy < n; ++iy) {
    const double ky = iy == n / 2 ? 0.0 : wavenumber(iy, n);
    for (int ix = 0; ix < n; ++ix) {
      const double kx = ix == n / 2 ? 0.0 : wavenumber(ix, n);
      const std::int64_t i = static_cast<std::int64_t>(iy) * n + ix;
      o0[i] = cplx(0.0, 1.0) * (kx * txx[i] + ky * txy[i]);
      o1[i] = cplx(0.0, 1.0) * (kx * txy[i] + ky * tyy[i]);
    }
  }
  return out;
}

SpectralField assemble_stress(const Distribution& g, double eps) {
  const int n = g.n();
  const std::int64_t nn = g.plane_size();
  const std::int64_t np = g.planes();
  const ConfigGrid& grid = g.grid();

  std::vector<double> txx(nn), txy(nn), tyy(nn);
  const std::int64_t tiles = (nn + kTile - 1) / kTile;
  parallel_for(tiles, [&](std::int64_t tile) {
    const std::int64_t x0 = tile * kTile;
    const int count = static_cast<int>(std::min<std::int64_t>(kTile, nn - x0));
    std::vector<double> slab(np * count);
    std::vector<double> column(np);
    g.gather_x_tile(x0, count, slab.data());
    for (int t = 0; t < count; ++t) {
      for (std::int64_t node = 0; node < np; ++node)
        column[node] = slab[node * count + t];
      const auto s = grid.stress(column, eps);
      txx[x0 + t] = s[0];
      txy[x0 + t] = s[1];
      tyy[x0 + t] = s[2];
    }
  });

  std::vector<double> packed(3 * nn);
  std::copy(txx.begin(), txx.end(), packed.begin());
  std::copy(txy.begin(), txy.end(), packed.begin() + nn);
  std::copy(tyy.begin(), tyy.end(), packed.begin() + 2 * nn);
  return SpectralField::from_physical(n, 3, packed);
}

SpectralField ns_rhs(const SpectralField& u, const SpectralField& tau,
                     const PolymerParams& params, bool nonlinear,
                     bool stress) {
  check_velocity(u, "ns_rhs");
  const int n = u.n();
  SpectralField rhs(n, 2);

  if (nonlinear) {
    Multipliers mult(n);
    std::vector<double> vx, vy;
    masked_samples(u, mult, vx, vy);
    rhs.axpy(-1.0, dealiased_advection(vx, vy, u, mult));
  }
  const double coef = params.stress_coef();
  if (stress && coef != 0.0) {
    if (tau.n() != n)
      throw std::invalid_argument("ns_rhs: stress grid mismatch");
    rhs.axpy(coef, tensor_divergence(tau));
  }
  leray_project(rhs);
  return rhs;
}

SpectralField pressure(const SpectralField& u, const SpectralField& tau,
                       const SpectralField* f_ext,
                       const PolymerParams& params) {
  check_velocity(u, "pressure");
  const int n = u.n();

  SpectralField force(n, 2);
  {
    Multipliers mult(n);
    std::vector<double> vx, vy;
    masked_samples(u, mult, vx, vy);
    force.axpy(-1.0, dealiased_advection(vx, vy, u, mult));
  }
  const double coef = params.stress_coef();
  if (coef != 0.0 && tau.components() == 3)
    force.axpy(coef, tensor_divergence(tau));
  if (f_ext != nullptr) force.axpy(1.0, *f_ext);

  SpectralField p(n, 1);
  auto f0 = force.comp(0);
  auto f1 = force.comp(1);
  auto pc = p.comp(0);
  for (int iy = 0; iy < n; ++iy) {
    const double ky = iy == n / 2 ? 0.0 : wavenumber(iy, n);
    for (int ix = 0; ix < n; ++ix) {
      const double kx = ix == n / 2 ? 0.0 : wavenumber(ix, n);
      const double k2 = kx * kx + ky * ky;
      if (k2 == 0.0) continue;
      const std::int64_t i = static_cast<std::int64_t>(iy) * n + ix;
      pc[i] = cplx(0.0, -1.0) * (kx * f0[i] + ky * f1[i]) / k2;
    }
  }
  return p;
}

namespace {

SpectralField step_core(const SpectralField& u, const SpectralField& tau,
                        double dt, const PolymerParams& params, bool nonlinear,
                        bool stress, const StepStages* wind,
                        StepStages* record) {
  check_velocity(u, "ns_step");
  if (!(dt > 0.0)) throw std::invalid_argument("ns_step: dt must be positive");
  const int n = u.n();
  const std::int64_t nn = u.modes_per_comp();

  if (nonlinear) {
    double umax = u.linf_norm();
    if (wind != nullptr)
      umax = std::max({wind->s0.linf_norm(), wind->s1.linf_norm(),
                       wind->s2.linf_norm()});
    if (umax * dt * n / kTau > 0.5)
      throw StabilityError("ns_step: CFL violated, max|u| dt N / 2pi = " +
                           std::to_string(umax * dt * n / kTau));
  }

  Multipliers mult(n);
  SpectralField forcing(n, 2);
  const double coef = params.stress_coef();
  if (stress && coef != 0.0) {
    if (tau.n() != n)
      throw std::invalid_argument("ns_step: stress grid mismatch");
    forcing.axpy(coef, tensor_divergence(tau));
  }

  // Projected tendency of one stage, advected by the matching wind field
  // (the state itself when no wind is given).
  std::vector<double> vx, vy;
  auto tendency = [&](const SpectralField& state, const SpectralField& adv) {
    SpectralField rhs = forcing;
    if (nonlinear) {
      masked_samples(adv, mult, vx, vy);
      rhs.axpy(-1.0, dealiased_advection(vx, vy, state, mult));
    }
    leray_project(rhs);
    return rhs;
  };

  // Viscous factor over a third of the step, exact per mode.
  const double nu = params.nu();
  std::vector<double> f1(nn);
  for (int iy = 0; iy < n; ++iy) {
    const double ky = wavenumber(iy, n);
    for (int ix = 0; ix < n; ++ix) {
      const double kx = wavenumber(ix, n);
      f1[static_cast<std::int64_t>(iy) * n + ix] =
          std::exp(-nu * (kx * kx + ky * ky) * dt / 3.0);
    }
  }
  auto damp = [&](SpectralField& a, int power) {
    for (int c = 0; c < a.components(); ++c) {
      auto ac = a.comp(c);
      for (std::int64_t i = 0; i < nn; ++i) {
        double m = f1[i];
        if (power == 2) m *= m;
        if (power == 3) m *= m * f1[i];
        ac[i] *= m;
      }
    }
  };

  const SpectralField n1 = tendency(u, wind ? wind->s0 : u);

  SpectralField u1 = u;
  u1.axpy(dt / 3.0, n1);
  damp(u1, 1);
  const SpectralField n2 = tendency(u1, wind ? wind->s1 : u1);

  SpectralField u2 = u;
  damp(u2, 1);
  SpectralField stage = n2;
  stage.scale(2.0 * dt / 3.0);
  u2.axpy(1.0, stage);
  damp(u2, 1);
  const SpectralField n3 = tendency(u2, wind ? wind->s2 : u2);

  SpectralField out = u;
  out.axpy(dt / 4.0, n1);
  damp(out, 3);
  SpectralField last = n3;
  damp(last, 1);
  out.axpy(3.0 * dt / 4.0, last);

  if (record != nullptr) {
    record->s0 = u;
    record->s1 = std::move(u1);
    record->s2 = std::move(u2);
  }

  out.zero_mean();
  for (int c = 0; c < 2; ++c)
    for (const cplx& a : out.comp(c))
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
        throw NumericalBreakdown("ns_step: non-finite velocity mode");
  return out;
}

}  // namespace

SpectralField ns_step(const SpectralField& u, const SpectralField& tau,
                      double dt, const PolymerParams& params, bool nonlinear,
                      bool stress) {
  return step_core(u, tau, dt, params, nonlinear, stress, nullptr, nullptr);
}

SpectralField ns_step_driven(const SpectralField& u, const StepStages* wind,
                             const SpectralField& tau, double dt,
                             const PolymerParams& params, StepStages* record) {
  return step_core(u, tau, dt, params, true,
                   params.stress_coef() != 0.0 && tau.components() == 3, wind,
                   record);
}

SpectralField transport_diffusion_step(const SpectralField& f,
                                       const SpectralField& v,
                                       const SpectralField& src, double nu,
                                       double dt) {
  check_velocity(v, "transport_diffusion_step");
  if (f.components() != 1)
    throw std::invalid_argument("transport_diffusion_step: scalar field only");
  if (f.n() != v.n() || (src.components() == 1 && src.n() != f.n()))
    throw std::invalid_argument("transport_diffusion_step: grid mismatch");
  const int n = f.n();
  const std::int64_t nn = f.modes_per_comp();

  const double umax = v.linf_norm();
  if (umax * dt * n / kTau > 0.5)
    throw StabilityError("transport_diffusion_step: CFL violated");

  Multipliers mult(n);
  std::vector<double> vx, vy;
  masked_samples(v, mult, vx, vy);

  auto rhs = [&](const SpectralField& state) {
    SpectralField r = dealiased_advection(vx, vy, state, mult);
    r.scale(-1.0);
    if (src.components() == 1) r.axpy(1.0, src);
    return r;
  };

  std::vector<double> f1(nn);
  for (int iy = 0; iy < n; ++iy) {
    const double ky = wavenumber(iy, n);
    for (int ix = 0; ix < n; ++ix) {
      const double kx = wavenumber(ix, n);
      f1[static_cast<std::int64_t>(iy) * n + ix] =
          std::exp(-nu * (kx * kx + ky * ky) * dt / 3.0);
    }
  }
  auto damp = [&](SpectralField& a, int power) {
    auto ac = a.comp(0);
    for (std::int64_t i = 0; i < nn; ++i) {
      double m = f1[i];
      if (power == 2) m *= m;
      if (power == 3) m *= m * f1[i];
      ac[i] *= m;
    }
  };

  const SpectralField k1 = rhs(f);
  SpectralField s1 = f;
  s1.axpy(dt / 3.0, k1);
  damp(s1, 1);
  const SpectralField k2 = rhs(s1);

  SpectralField s2 = f;
  damp(s2, 1);
  SpectralField mid = k2;
  mid.scale(2.0 * dt / 3.0);
  s2.axpy(1.0, mid);
  damp(s2, 1);
  const SpectralField k3 = rhs(s2);

  SpectralField out = f;
  out.axpy(dt / 4.0, k1);
  damp(out, 3);
  SpectralField tail = k3;
  damp(tail, 1);
  out.axpy(3.0 * dt / 4.0, tail);

  for (const cplx& a : out.comp(0))
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
      throw NumericalBreakdown("transport_diffusion_step: non-finite mode");
  return out;
}

SpectralField taylor_green(int n, double amplitude, double t, double nu) {
  const double a = amplitude * std::exp(-2.0 * nu * t);
  const std::int64_t nn = static_cast<std::int64_t>(n) * n;
  std::vector<double> vals(2 * nn);
  for (int iy = 0; iy < n; ++iy) {
    const double y = kTau * iy / n;
    for (int ix = 0; ix < n; ++ix) {
      const double x = kTau * ix / n;
      const std::int64_t i = static_cast<std::int64_t>(iy) * n + ix;
      vals[i] = a * std::sin(x) * std::cos(y);
      vals[nn + i] = -a * std::cos(x) * std::sin(y);
    }
  }
  return SpectralField::from_physical(n, 2, vals);
}

SpectralField taylor_green_pressure(int n, double amplitude, double t,
                                    double nu) {
  const double a = amplitude * std::exp(-2.0 * nu * t);
  const std::int64_t nn = static_cast<std::int64_t>(n) * n;
  std::vector<double> vals(nn);
  for (int iy = 0; iy < n; ++iy) {
    const double y = kTau * iy / n;
    for (int ix = 0; ix < n; ++ix) {
      const double x = kTau * ix / n;
      vals[static_cast<std::int64_t>(iy) * n + ix] =
          0.25 * a * a * (std::cos(2.0 * x) + std::cos(2.0 * y));
    }
  }
  return SpectralField::from_physical(n, 1, vals);
}

}  // namespace fene
