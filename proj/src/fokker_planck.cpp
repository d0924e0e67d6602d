#include "fene/fokker_planck.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fene/besov.hpp"
#include "fene/errors.hpp"
#include "fene/fft.hpp"
#include "fene/parallel.hpp"

namespace fene {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;
constexpr std::int64_t kTile = 64;

/// C (rows_out x X) = M (rows_out x rows_in) . B, rows of B and C spaced
/// by the given strides, X contiguous.
void matmul_rows(const double* m, int rows_out, int rows_in, const double* b,
                 std::int64_t bstride, double* c, std::int64_t cstride,
                 int X) {
  for (int io = 0; io < rows_out; ++io) {
    double* crow = c + io * cstride;
    std::fill(crow, crow + X, 0.0);
    const double* mrow = m + static_cast<std::int64_t>(io) * rows_in;
    for (int ii = 0; ii < rows_in; ++ii) {
      const double coef = mrow[ii];
      if (coef == 0.0) continue;
      const double* brow = b + ii * bstride;
      for (int x = 0; x < X; ++x) crow[x] += coef * brow[x];
    }
  }
}

/// Cyclic Jacobi diagonalization of a symmetric matrix. a is destroyed;
/// eigenvalues land on its diagonal, eigenvectors in the columns of v.
void jacobi_eigen(std::vector<double>& a, int n, std::vector<double>& v) {
  v.assign(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) v[static_cast<size_t>(i) * n + i] = 1.0;
  double fro = 0.0;
  for (double x : a) fro += x * x;
  const double tol = std::max(fro, 1e-300) * 1e-30;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += 2.0 * a[p * n + q] * a[p * n + q];
    if (off <= tol) return;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = std::copysign(
            1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0)), theta);
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int i = 0; i < n; ++i) {
          const double aip = a[i * n + p], aiq = a[i * n + q];
          a[i * n + p] = c * aip - s * aiq;
          a[i * n + q] = s * aip + c * aiq;
        }
        for (int i = 0; i < n; ++i) {
          const double api = a[p * n + i], aqi = a[q * n + i];
          a[p * n + i] = c * api - s * aqi;
          a[q * n + i] = s * api + c * aqi;
        }
        for (int i = 0; i < n; ++i) {
          const double vip = v[i * n + p], viq = v[i * n + q];
          v[i * n + p] = c * vip - s * viq;
          v[i * n + q] = s * vip + c * viq;
        }
      }
    }
  }
  throw NumericalBreakdown("jacobi_eigen: no convergence in 100 sweeps");
}

/// Drag transport tendency for X packed slabs: out = -div_R(sigma R psi)
/// / psi_inf in flux form. qr holds rhat.sigma.rhat at cell angles, qt
/// holds thetahat.sigma.rhat at face angles, both laid out [m * X + x].
void drag_tendency_batch(const ConfigGrid& grid, const double* g, int X,
                         const double* qr, const double* qt, double* out) {
  const int nr = grid.n_r(), nth = grid.n_theta();
  const double dr = grid.dr(), dth = grid.dtheta();
  for (int i = 0; i < nr; ++i) {
    const double rf_out = (i + 1.0) * dr;
    const double rf_in = static_cast<double>(i) * dr;
    const double a_out =
        i + 1 < nr ? 0.5 * rf_out * rf_out * dth * grid.psi_inf_face(i) : 0.0;
    const double a_in =
        i > 0 ? 0.5 * rf_in * rf_in * dth * grid.psi_inf_face(i - 1) : 0.0;
    const double a_th = 0.5 * grid.r(i) * dr * grid.psi_inf(i);
    const double inv_d = 1.0 / grid.wpsi(i);
    for (int m = 0; m < nth; ++m) {
      const int mp = (m + 1) % nth;
      const int mm = (m + nth - 1) % nth;
      const double* g0 = g + (static_cast<std::int64_t>(i) * nth + m) * X;
      const double* gup =
          i + 1 < nr ? g + (static_cast<std::int64_t>(i + 1) * nth + m) * X
                     : g0;
      const double* gdn =
          i > 0 ? g + (static_cast<std::int64_t>(i - 1) * nth + m) * X : g0;
      const double* gmp = g + (static_cast<std::int64_t>(i) * nth + mp) * X;
      const double* gmm = g + (static_cast<std::int64_t>(i) * nth + mm) * X;
      const double* qr_m = qr + static_cast<std::int64_t>(m) * X;
      const double* qt_m = qt + static_cast<std::int64_t>(m) * X;
      const double* qt_mm = qt + static_cast<std::int64_t>(mm) * X;
      double* o = out + (static_cast<std::int64_t>(i) * nth + m) * X;
      for (int x = 0; x < X; ++x) {
        const double flux_r_out = a_out * qr_m[x] * (g0[x] + gup[x]);
        const double flux_r_in = a_in * qr_m[x] * (gdn[x] + g0[x]);
        const double flux_t_out = a_th * qt_m[x] * (g0[x] + gmp[x]);
        const double flux_t_in = a_th * qt_mm[x] * (gmm[x] + g0[x]);
        o[x] = -(flux_r_out - flux_r_in + flux_t_out - flux_t_in) * inv_d;
      }
    }
  }
}

void fill_drag_quadratics(const ConfigGrid& grid, const DragField& sigma,
                          std::int64_t x0, int X, double* qr, double* qt) {
  const int nth = grid.n_theta();
  for (int m = 0; m < nth; ++m) {
    const double c = grid.cos_th(m), s = grid.sin_th(m);
    const double cf = grid.cos_face(m), sf = grid.sin_face(m);
    double* qr_m = qr + static_cast<std::int64_t>(m) * X;
    double* qt_m = qt + static_cast<std::int64_t>(m) * X;
    for (int x = 0; x < X; ++x) {
      const std::int64_t xg = x0 + x;
      const double s00 = sigma.s00[xg], s01 = sigma.s01[xg];
      const double s10 = sigma.s10[xg], s11 = sigma.s11[xg];
      qr_m[x] = s00 * c * c + (s01 + s10) * c * s + s11 * s * s;
      qt_m[x] = (s10 - s01) * 0.5 +
                (s10 + s01) * 0.5 * (cf * cf - sf * sf) +
                (s11 - s00) * cf * sf;
    }
  }
}

double tile_dirichlet(const Distribution& g, double q) {
  const ConfigGrid& grid = g.grid();
  const std::int64_t ps = g.plane_size();
  const std::int64_t np = g.planes();
  const std::int64_t tiles = (ps + kTile - 1) / kTile;
  std::vector<double> per_tile(tiles, 0.0);
  parallel_for(tiles, [&](std::int64_t t) {
    const std::int64_t x0 = t * kTile;
    const int count = static_cast<int>(std::min(kTile, ps - x0));
    std::vector<double> tile(np * count), slab(np);
    g.gather_x_tile(x0, count, tile.data());
    double s = 0.0;
    for (int x = 0; x < count; ++x) {
      if (q == 1.0) {
        for (std::int64_t node = 0; node < np; ++node)
          slab[node] = tile[node * count + x];
      } else {
        for (std::int64_t node = 0; node < np; ++node)
          slab[node] = signed_power(tile[node * count + x], q);
      }
      s += grid.dirichlet_form(slab);
    }
    per_tile[t] = s;
  });
  const double cell = kTau * kTau / static_cast<double>(ps);
  return cell * deterministic_sum(per_tile);
}

}  // namespace

DragField DragField::zero(int n) {
  DragField d;
  d.n = n;
  const std::int64_t nn = d.size();
  d.s00.assign(nn, 0.0);
  d.s01.assign(nn, 0.0);
  d.s10.assign(nn, 0.0);
  d.s11.assign(nn, 0.0);
  return d;
}

DragField DragField::uniform(int n, const std::array<double, 4>& s,
                             DragType type) {
  DragField d = zero(n);
  d.type = type;
  double s00 = s[0], s01 = s[1], s10 = s[2], s11 = s[3];
  if (type == DragType::kCorotational) {
    const double a = 0.5 * (s01 - s10);
    s00 = s11 = 0.0;
    s01 = a;
    s10 = -a;
  }
  std::fill(d.s00.begin(), d.s00.end(), s00);
  std::fill(d.s01.begin(), d.s01.end(), s01);
  std::fill(d.s10.begin(), d.s10.end(), s10);
  std::fill(d.s11.begin(), d.s11.end(), s11);
  return d;
}

DragField DragField::from_velocity(const SpectralField& u, DragType type) {
  if (u.components() != 2)
    throw std::invalid_argument("DragField: velocity must have 2 components");
  const int n = u.n();
  DragField d = zero(n);
  d.type = type;
  const Fft2d& fft = fft_for(n);
  const std::int64_t nn = d.size();

  // One packed transform per component: dx + i dy of that component.
  std::vector<cplx> buf(nn);
  for (int c = 0; c < 2; ++c) {
    auto coefs = u.comp(c);
    for (int iy = 0; iy < n; ++iy) {
      const int wy = iy == n / 2 ? 0 : wavenumber(iy, n);
      for (int ix = 0; ix < n; ++ix) {
        const int wx = ix == n / 2 ? 0 : wavenumber(ix, n);
        const std::int64_t i = static_cast<std::int64_t>(iy) * n + ix;
        buf[i] = cplx(0.0, wx) * coefs[i] +
                 cplx(0.0, 1.0) * (cplx(0.0, wy) * coefs[i]);
      }
    }
    fft.backward(buf.data());
    double* dx = c == 0 ? d.s00.data() : d.s10.data();
    double* dy = c == 0 ? d.s01.data() : d.s11.data();
    for (std::int64_t i = 0; i < nn; ++i) {
      dx[i] = buf[i].real();
      dy[i] = buf[i].imag();
    }
  }
  if (type == DragType::kCorotational) {
    for (std::int64_t i = 0; i < nn; ++i) {
      const double a = 0.5 * (d.s01[i] - d.s10[i]);
      d.s00[i] = 0.0;
      d.s11[i] = 0.0;
      d.s01[i] = a;
      d.s10[i] = -a;
    }
  }
  return d;
}

double DragField::max_norm() const {
  double best = 0.0;
  for (std::int64_t i = 0; i < size(); ++i) {
    const double f = s00[i] * s00[i] + s01[i] * s01[i] + s10[i] * s10[i] +
                     s11[i] * s11[i];
    best = std::max(best, f);
  }
  return std::sqrt(best);
}

double DragField::antisymmetry_defect() const {
  double best = 0.0;
  for (std::int64_t i = 0; i < size(); ++i) {
    best = std::max(best, std::abs(s00[i]));
    best = std::max(best, std::abs(s11[i]));
    best = std::max(best, std::abs(s01[i] + s10[i]));
  }
  return best;
}

FpPropagator::FpPropagator(std::shared_ptr<const ConfigGrid> grid, double dt)
    : grid_(std::move(grid)), dt_(dt) {
  if (!grid_) throw std::invalid_argument("FpPropagator: null grid");
  if (!(dt > 0.0)) throw std::invalid_argument("FpPropagator: dt must be > 0");
  const int nr = grid_->n_r(), nth = grid_->n_theta();

  // Orthonormal angular basis: constant, cos/sin pairs, alternating.
  q_.assign(static_cast<size_t>(nth) * nth, 0.0);
  mode_of_col_.assign(nth, 0);
  const double inv_sq = 1.0 / std::sqrt(static_cast<double>(nth));
  const double pair_sq = std::sqrt(2.0 / nth);
  for (int m = 0; m < nth; ++m) {
    const double th = (m + 0.5) * grid_->dtheta();
    q_[static_cast<size_t>(m) * nth + 0] = inv_sq;
    for (int l = 1; l < nth / 2; ++l) {
      q_[static_cast<size_t>(m) * nth + 2 * l - 1] = pair_sq * std::cos(l * th);
      q_[static_cast<size_t>(m) * nth + 2 * l] = pair_sq * std::sin(l * th);
    }
    q_[static_cast<size_t>(m) * nth + nth - 1] = (m % 2 ? -inv_sq : inv_sq);
  }
  for (int l = 1; l < nth / 2; ++l) {
    mode_of_col_[2 * l - 1] = l;
    mode_of_col_[2 * l] = l;
  }
  mode_of_col_[nth - 1] = nth / 2;
  qt_.resize(q_.size());
  for (int a = 0; a < nth; ++a)
    for (int b = 0; b < nth; ++b)
      qt_[static_cast<size_t>(a) * nth + b] =
          q_[static_cast<size_t>(b) * nth + a];

  // Per-mode radial propagators through the symmetrized eigenproblem.
  const int n_modes = nth / 2 + 1;
  prop_.assign(static_cast<size_t>(n_modes) * nr * nr, 0.0);
  std::vector<double> sym(static_cast<size_t>(nr) * nr);
  std::vector<double> vecs, expo(nr), sqd(nr);
  for (int i = 0; i < nr; ++i) sqd[i] = std::sqrt(grid_->wpsi(i));
  for (int l = 0; l < n_modes; ++l) {
    const double mu = -4.0 * std::pow(std::sin(std::numbers::pi * l / nth), 2);
    std::fill(sym.begin(), sym.end(), 0.0);
    for (int i = 0; i < nr; ++i) {
      const double cr_hi = grid_->radial_face_coef(i);
      const double cr_lo = i > 0 ? grid_->radial_face_coef(i - 1) : 0.0;
      sym[static_cast<size_t>(i) * nr + i] =
          (-(cr_hi + cr_lo) + mu * grid_->theta_face_coef(i)) /
          (2.0 * grid_->wpsi(i));
      if (i + 1 < nr) {
        const double off = cr_hi / (2.0 * sqd[i] * sqd[i + 1]);
        sym[static_cast<size_t>(i) * nr + i + 1] = off;
        sym[static_cast<size_t>(i + 1) * nr + i] = off;
      }
    }
    jacobi_eigen(sym, nr, vecs);
    for (int i = 0; i < nr; ++i)
      expo[i] = std::exp(std::min(sym[static_cast<size_t>(i) * nr + i], 0.0) *
                         dt);

    // E = V exp(lambda dt) V^T in the symmetrized variables.
    std::vector<double> e(static_cast<size_t>(nr) * nr, 0.0);
    for (int a = 0; a < nr; ++a)
      for (int c = 0; c < nr; ++c) {
        double s = 0.0;
        for (int b = 0; b < nr; ++b)
          s += vecs[static_cast<size_t>(a) * nr + b] * expo[b] *
               vecs[static_cast<size_t>(c) * nr + b];
        e[static_cast<size_t>(a) * nr + c] = s;
      }

    if (l == 0) {
      // Pin the analytic null direction so the constant slab and the
      // weighted mass are exact fixed points.
      std::vector<double> v(nr);
      double norm = 0.0;
      for (int i = 0; i < nr; ++i) norm += sqd[i] * sqd[i];
      norm = std::sqrt(norm);
      for (int i = 0; i < nr; ++i) v[i] = sqd[i] / norm;
      std::vector<double> ev(nr, 0.0), ve(nr, 0.0);
      double vev = 0.0;
      for (int a = 0; a < nr; ++a)
        for (int b = 0; b < nr; ++b) {
          ev[a] += e[static_cast<size_t>(a) * nr + b] * v[b];
          ve[b] += v[a] * e[static_cast<size_t>(a) * nr + b];
        }
      for (int a = 0; a < nr; ++a) vev += v[a] * ev[a];
      for (int a = 0; a < nr; ++a)
        for (int b = 0; b < nr; ++b)
          e[static_cast<size_t>(a) * nr + b] +=
              v[a] * v[b] * (1.0 + vev) - v[a] * ve[b] - ev[a] * v[b];
    }

    double* p = prop_.data() + static_cast<size_t>(l) * nr * nr;
    for (int a = 0; a < nr; ++a)
      for (int b = 0; b < nr; ++b)
        p[static_cast<size_t>(a) * nr + b] =
            e[static_cast<size_t>(a) * nr + b] * sqd[b] / sqd[a];
  }
}

void FpPropagator::apply_batch(double* tile, int X) const {
  const int nr = grid_->n_r(), nth = grid_->n_theta();
  std::vector<double> sc(static_cast<size_t>(nr) * nth * X);
  std::vector<double> temp(static_cast<size_t>(nth) * X);

  const std::int64_t ring = static_cast<std::int64_t>(nth) * X;
  for (int i = 0; i < nr; ++i)
    matmul_rows(qt_.data(), nth, nth, tile + i * ring, X, sc.data() + i * ring,
                X, X);
  for (int col = 0; col < nth; ++col) {
    const double* p =
        prop_.data() + static_cast<size_t>(mode_of_col_[col]) * nr * nr;
    matmul_rows(p, nr, nr, sc.data() + static_cast<std::int64_t>(col) * X,
                ring, tile + static_cast<std::int64_t>(col) * X, ring, X);
  }
  for (int i = 0; i < nr; ++i) {
    std::copy(tile + i * ring, tile + (i + 1) * ring, temp.begin());
    matmul_rows(q_.data(), nth, nth, temp.data(), X, tile + i * ring, X, X);
  }
}

void FpPropagator::apply_slab(std::span<double> slab) const {
  apply_batch(slab.data(), 1);
}

void diffusion_tendency(const ConfigGrid& grid, std::span<const double> g,
                        std::span<double> out) {
  const int nr = grid.n_r(), nth = grid.n_theta();
  for (int i = 0; i < nr; ++i) {
    const double cr_hi = grid.radial_face_coef(i);
    const double cr_lo = i > 0 ? grid.radial_face_coef(i - 1) : 0.0;
    const double cth = grid.theta_face_coef(i);
    const double inv2d = 1.0 / (2.0 * grid.wpsi(i));
    for (int m = 0; m < nth; ++m) {
      const size_t idx = static_cast<size_t>(i) * nth + m;
      const double up = i + 1 < nr ? g[idx + nth] - g[idx] : 0.0;
      const double dn = i > 0 ? g[idx] - g[idx - nth] : 0.0;
      const double east = g[static_cast<size_t>(i) * nth + (m + 1) % nth];
      const double west =
          g[static_cast<size_t>(i) * nth + (m + nth - 1) % nth];
      out[idx] =
          (cr_hi * up - cr_lo * dn + cth * (east - 2.0 * g[idx] + west)) *
          inv2d;
    }
  }
}

void drag_tendency(const ConfigGrid& grid, std::span<const double> g,
                   const std::array<double, 4>& sigma, std::span<double> out) {
  const int nth = grid.n_theta();
  std::vector<double> qr(nth), qt(nth);
  for (int m = 0; m < nth; ++m) {
    const double c = grid.cos_th(m), s = grid.sin_th(m);
    const double cf = grid.cos_face(m), sf = grid.sin_face(m);
    qr[m] = sigma[0] * c * c + (sigma[1] + sigma[2]) * c * s +
            sigma[3] * s * s;
    qt[m] = (sigma[2] - sigma[1]) * 0.5 +
            (sigma[2] + sigma[1]) * 0.5 * (cf * cf - sf * sf) +
            (sigma[3] - sigma[0]) * cf * sf;
  }
  drag_tendency_batch(grid, g.data(), 1, qr.data(), qt.data(), out.data());
}

void fp_rhs(const ConfigGrid& grid, std::span<const double> g,
            const std::array<double, 4>& sigma, std::span<double> out) {
  std::vector<double> drag(grid.nodes());
  diffusion_tendency(grid, g, out);
  drag_tendency(grid, g, sigma, drag);
  for (int i = 0; i < grid.nodes(); ++i) out[i] += drag[i];
}

void fp_step(Distribution& g, const DragField& sigma, const FpPropagator& half,
             double dt) {
  if (&half.grid() != &g.grid() && !half.grid().matches(g.grid()))
    throw std::invalid_argument("fp_step: propagator built for another grid");
  if (std::abs(half.dt() - 0.5 * dt) > 1e-12 * dt)
    throw std::invalid_argument("fp_step: propagator dt is not dt/2");
  if (sigma.n != g.n())
    throw std::invalid_argument("fp_step: drag field grid mismatch");
  const ConfigGrid& grid = g.grid();
  const double limit = 0.5 * std::min(grid.dr(), grid.dtheta());
  const double smax = sigma.max_norm();
  if (dt * smax > limit)
    throw StabilityError("fp_step: drag CFL violated, dt*|sigma| = " +
                         std::to_string(dt * smax) + " > " +
                         std::to_string(limit));

  const std::int64_t ps = g.plane_size();
  const std::int64_t np = g.planes();
  const int nth = grid.n_theta();
  const std::int64_t tiles = (ps + kTile - 1) / kTile;
  parallel_for(tiles, [&](std::int64_t t) {
    const std::int64_t x0 = t * kTile;
    const int X = static_cast<int>(std::min(kTile, ps - x0));
    std::vector<double> tile(np * X), t1(np * X), stage(np * X);
    std::vector<double> qr(static_cast<size_t>(nth) * X),
        qt(static_cast<size_t>(nth) * X);
    g.gather_x_tile(x0, X, tile.data());
    fill_drag_quadratics(grid, sigma, x0, X, qr.data(), qt.data());

    half.apply_batch(tile.data(), X);
    drag_tendency_batch(grid, tile.data(), X, qr.data(), qt.data(), t1.data());
    for (std::int64_t i = 0; i < np * X; ++i)
      stage[i] = tile[i] + dt * t1[i];
    drag_tendency_batch(grid, stage.data(), X, qr.data(), qt.data(),
                        t1.data());
    for (std::int64_t i = 0; i < np * X; ++i)
      tile[i] = 0.5 * (tile[i] + stage[i] + dt * t1[i]);
    half.apply_batch(tile.data(), X);

    g.scatter_x_tile(x0, X, tile.data());
  });
}

void advect(Distribution& g, const SpectralField& u, double dt) {
  if (u.components() != 2)
    throw std::invalid_argument("advect: velocity must have two components");
  if (u.n() != g.n()) throw std::invalid_argument("advect: grid mismatch");
  const int n = g.n();
  const double umax = u.linf_norm();
  if (umax * dt * n / kTau > 0.5)
    throw StabilityError("advect: CFL violated, max|u| dt N / 2pi = " +
                         std::to_string(umax * dt * n / kTau));

  const Fft2d& fft = fft_for(n);
  const std::int64_t nn = g.plane_size();
  const std::int64_t np = g.planes();
  const std::int64_t pairs = (np + 1) / 2;
  const double inv_nn = 1.0 / static_cast<double>(nn);

  // Fused 2/3-rule and derivative multipliers.
  const int kmax = (n - 1) / 3;
  std::vector<double> mkx(nn), mky(nn), keep(nn);
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

  // Dealiased physical advecting velocity.
  std::vector<double> vx(nn), vy(nn);
  {
    std::vector<cplx> buf(nn);
    auto u0 = u.comp(0);
    auto u1 = u.comp(1);
    for (std::int64_t i = 0; i < nn; ++i)
      buf[i] = keep[i] * (u0[i] + cplx(0.0, 1.0) * u1[i]);
    fft.backward(buf.data());
    for (std::int64_t i = 0; i < nn; ++i) {
      vx[i] = buf[i].real();
      vy[i] = buf[i].imag();
    }
  }

  parallel_for(pairs, [&](std::int64_t q) {
    const std::int64_t a = 2 * q;
    const std::int64_t b = std::min(a + 1, np - 1);
    std::vector<cplx> y0(nn), y(nn), dx(nn), dy(nn), rhs(nn);
    {
      const double* pa = g.plane(a);
      const double* pb = g.plane(b);
      for (std::int64_t i = 0; i < nn; ++i) y0[i] = cplx(pa[i], pb[i]);
    }
    fft.forward(y0.data());

    auto eval_rhs = [&](const std::vector<cplx>& state) {
      for (std::int64_t i = 0; i < nn; ++i) {
        dx[i] = cplx(0.0, mkx[i]) * state[i];
        dy[i] = cplx(0.0, mky[i]) * state[i];
      }
      fft.backward(dx.data());
      fft.backward(dy.data());
      for (std::int64_t i = 0; i < nn; ++i)
        rhs[i] = vx[i] * dx[i] + vy[i] * dy[i];
      fft.forward(rhs.data());
      for (std::int64_t i = 0; i < nn; ++i)
        rhs[i] *= -keep[i] * inv_nn;
    };

    // Third-order Heun: k1 at y0, k2 at y0 + dt/3 k1, k3 at y0 + 2dt/3 k2,
    // update with (k1 + 3 k3)/4.
    eval_rhs(y0);
    std::vector<cplx> k1 = rhs;
    for (std::int64_t i = 0; i < nn; ++i) y[i] = y0[i] + dt / 3.0 * k1[i];
    eval_rhs(y);
    for (std::int64_t i = 0; i < nn; ++i)
      y[i] = y0[i] + 2.0 * dt / 3.0 * rhs[i];
    eval_rhs(y);
    for (std::int64_t i = 0; i < nn; ++i)
      y0[i] += dt * (0.25 * k1[i] + 0.75 * rhs[i]);

    fft.backward(y0.data());
    double* pa = g.plane(a);
    double* pb = g.plane(b);
    for (std::int64_t i = 0; i < nn; ++i) {
      pa[i] = inv_nn * y0[i].real();
      if (b != a) pb[i] = inv_nn * y0[i].imag();
    }
  });
}

double entropy_moment(const Distribution& g, double p) {
  return std::pow(g.weighted_lp_norm(p), p);
}

double entropy_dissipation(const Distribution& g, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("entropy_dissipation: p < 1");
  return tile_dirichlet(g, 0.5 * p);
}

EntropyReport entropy_report(std::span<const Distribution> history, double p) {
  EntropyReport rep;
  rep.moment.reserve(history.size());
  rep.dissipation.reserve(history.size());
  for (const Distribution& g : history) {
    rep.moment.push_back(entropy_moment(g, p));
    rep.dissipation.push_back(entropy_dissipation(g, p));
  }
  return rep;
}

}  // namespace fene
