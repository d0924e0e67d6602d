#include "fene/besov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fene/parallel.hpp"

namespace fene {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

void check_block_range(const DyadicPartition& part, int j, int extra_top) {
  if (j < part.j_min() || j > part.j_max() + extra_top)
    throw std::invalid_argument("block index out of range: j = " +
                                std::to_string(j));
}

SpectralField apply_mask(const SpectralField& f,
                         const std::vector<double>& mask) {
  SpectralField out = f;
  const std::int64_t nn = out.modes_per_comp();
  for (int c = 0; c < out.components(); ++c) {
    auto coefs = out.comp(c);
    for (std::int64_t i = 0; i < nn; ++i) coefs[i] *= mask[i];
  }
  return out;
}

/// Planes node_a, node_b packed as re/im of one complex grid. Masks are
/// even under lattice negation, so one masked round trip filters both.
void load_pair(const Distribution& g, std::int64_t node_a, std::int64_t node_b,
               cplx* c) {
  const double* a = g.plane(node_a);
  const double* b = g.plane(node_b);
  const std::int64_t nn = g.plane_size();
  for (std::int64_t i = 0; i < nn; ++i) c[i] = cplx(a[i], b[i]);
}

void store_pair(Distribution& g, std::int64_t node_a, std::int64_t node_b,
                const cplx* c, double scale) {
  double* a = g.plane(node_a);
  double* b = g.plane(node_b);
  const std::int64_t nn = g.plane_size();
  for (std::int64_t i = 0; i < nn; ++i) {
    a[i] = scale * c[i].real();
    if (node_b != node_a) b[i] = scale * c[i].imag();
  }
}

Distribution apply_mask(const Distribution& g,
                        const std::vector<double>& mask) {
  Distribution out(g.n(), g.grid_ptr());
  const Fft2d& fft = fft_for(g.n());
  const std::int64_t nn = g.plane_size();
  const std::int64_t pairs = (g.planes() + 1) / 2;
  const double scale = 1.0 / static_cast<double>(nn);
  parallel_for(pairs, [&](std::int64_t q) {
    const std::int64_t a = 2 * q;
    const std::int64_t b = std::min(a + 1, g.planes() - 1);
    std::vector<cplx> buf(nn);
    load_pair(g, a, b, buf.data());
    fft.forward(buf.data());
    for (std::int64_t i = 0; i < nn; ++i) buf[i] *= mask[i];
    fft.backward(buf.data());
    store_pair(out, a, b, buf.data(), scale);
  });
  return out;
}

double trapezoid(const std::vector<std::vector<double>>& series, size_t col,
                 double dt, double power) {
  const size_t rows = series.size();
  double sum = 0.0;
  for (size_t t = 0; t < rows; ++t) {
    const double w = (t == 0 || t + 1 == rows) ? 0.5 : 1.0;
    const double v = series[t][col];
    sum += w * (power == 1.0 ? v : std::pow(v, power));
  }
  return sum * dt;
}

}  // namespace

void BesovParams::validate() const {
  if (!(p >= 1.0) || std::isinf(p))
    throw std::invalid_argument("BesovParams: p must lie in [1, inf)");
  if (!(r >= 1.0) || std::isinf(r))
    throw std::invalid_argument("BesovParams: r must lie in [1, inf)");
}

SpectralField lp_block(const SpectralField& f, int j) {
  const auto& part = DyadicPartition::for_grid(f.n());
  check_block_range(part, j, 0);
  return apply_mask(f, part.mask(j));
}

SpectralField low_freq(const SpectralField& f, int j) {
  const auto& part = DyadicPartition::for_grid(f.n());
  if (j < 0 || j > part.j_max() + 1)
    throw std::invalid_argument("low_freq: j out of range");
  return apply_mask(f, part.lowpass(j));
}

Distribution lp_block(const Distribution& g, int j) {
  const auto& part = DyadicPartition::for_grid(g.n());
  check_block_range(part, j, 0);
  return apply_mask(g, part.mask(j));
}

Distribution low_freq(const Distribution& g, int j) {
  const auto& part = DyadicPartition::for_grid(g.n());
  if (j < 0 || j > part.j_max() + 1)
    throw std::invalid_argument("low_freq: j out of range");
  return apply_mask(g, part.lowpass(j));
}

std::vector<double> block_lp_norms(const SpectralField& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("block_lp_norms: p < 1");
  const auto& part = DyadicPartition::for_grid(f.n());
  const int nb = part.block_count();
  std::vector<double> norms(nb);
  if (p == 2.0) {
    const std::int64_t nn = f.modes_per_comp();
    for (int b = 0; b < nb; ++b) {
      const auto& m = part.mask(b - 1);
      double s = 0.0;
      for (int c = 0; c < f.components(); ++c) {
        auto coefs = f.comp(c);
        for (std::int64_t i = 0; i < nn; ++i)
          s += m[i] * m[i] * std::norm(coefs[i]);
      }
      norms[b] = kTau * std::sqrt(s);
    }
  } else {
    for (int b = 0; b < nb; ++b)
      norms[b] = lp_block(f, b - 1).lp_norm(p);
  }
  return norms;
}

std::vector<double> block_lp_norms(const Distribution& g, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("block_lp_norms: p < 1");
  const auto& part = DyadicPartition::for_grid(g.n());
  const Fft2d& fft = fft_for(g.n());
  const int n = g.n();
  const int nb = part.block_count();
  const std::int64_t nn = g.plane_size();
  const std::int64_t np = g.planes();
  const std::int64_t pairs = (np + 1) / 2;
  const auto& wpsi = g.grid().wpsi_node();

  std::vector<double> partial(np * nb, 0.0);
  parallel_for(pairs, [&](std::int64_t q) {
    const std::int64_t a = 2 * q;
    const std::int64_t b = std::min(a + 1, np - 1);
    std::vector<cplx> buf(nn);
    load_pair(g, a, b, buf.data());
    fft.forward(buf.data());
    if (p == 2.0) {
      // Unpack |a_hat|^2, |b_hat|^2 once; Parseval per block after that.
      std::vector<double> pa(nn), pb(nn);
      for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
          const std::int64_t idx = static_cast<std::int64_t>(iy) * n + ix;
          const std::int64_t neg =
              static_cast<std::int64_t>((n - iy) % n) * n + (n - ix) % n;
          const cplx ah = 0.5 * (buf[idx] + std::conj(buf[neg]));
          const cplx bh = cplx(0.0, -0.5) * (buf[idx] - std::conj(buf[neg]));
          pa[idx] = std::norm(ah);
          pb[idx] = std::norm(bh);
        }
      }
      const double scale = kTau * kTau / (static_cast<double>(nn) * nn);
      for (int blk = 0; blk < nb; ++blk) {
        const auto& m = part.mask(blk - 1);
        double sa = 0.0, sb = 0.0;
        for (std::int64_t i = 0; i < nn; ++i) {
          const double m2 = m[i] * m[i];
          sa += m2 * pa[i];
          sb += m2 * pb[i];
        }
        partial[a * nb + blk] = wpsi[a] * scale * sa;
        if (b != a) partial[b * nb + blk] = wpsi[b] * scale * sb;
      }
    } else {
      std::vector<cplx> blocked(nn);
      const double scale = 1.0 / static_cast<double>(nn);
      for (int blk = 0; blk < nb; ++blk) {
        const auto& m = part.mask(blk - 1);
        for (std::int64_t i = 0; i < nn; ++i) blocked[i] = m[i] * buf[i];
        fft.backward(blocked.data());
        double sa = 0.0, sb = 0.0;
        for (std::int64_t i = 0; i < nn; ++i) {
          sa += std::pow(std::abs(scale * blocked[i].real()), p);
          sb += std::pow(std::abs(scale * blocked[i].imag()), p);
        }
        const double cell = kTau * kTau / static_cast<double>(nn);
        partial[a * nb + blk] = wpsi[a] * cell * sa;
        if (b != a) partial[b * nb + blk] = wpsi[b] * cell * sb;
      }
    }
  });

  std::vector<double> norms(nb);
  for (int blk = 0; blk < nb; ++blk) {
    double total = 0.0;
    for (std::int64_t node = 0; node < np; ++node)
      total += partial[node * nb + blk];
    norms[blk] = std::pow(total, 1.0 / p);
  }
  return norms;
}

double compose_block_norms(std::span<const double> block_norms, double s,
                           double r) {
  if (block_norms.empty())
    throw std::invalid_argument("compose_block_norms: no blocks");
  if (std::isinf(r)) {
    double best = 0.0;
    for (size_t b = 0; b < block_norms.size(); ++b) {
      const int j = static_cast<int>(b) - 1;
      best = std::max(best, std::exp2(j * s) * block_norms[b]);
    }
    return best;
  }
  double sum = 0.0;
  for (size_t b = 0; b < block_norms.size(); ++b) {
    const int j = static_cast<int>(b) - 1;
    sum += std::pow(std::exp2(j * s) * block_norms[b], r);
  }
  return std::pow(sum, 1.0 / r);
}

double besov_norm(const SpectralField& f, const BesovParams& bp) {
  bp.validate();
  return compose_block_norms(block_lp_norms(f, bp.p), bp.s, bp.r);
}

double besov_lp_norm(const Distribution& g, const BesovParams& bp) {
  bp.validate();
  return compose_block_norms(block_lp_norms(g, bp.p), bp.s, bp.r);
}

double chemin_lerner_norm(const std::vector<std::vector<double>>& series,
                          double dt, double rho, const BesovParams& bp) {
  bp.validate();
  if (series.empty() || series.front().empty())
    throw std::invalid_argument("chemin_lerner_norm: empty series");
  if (!(rho >= 1.0))
    throw std::invalid_argument("chemin_lerner_norm: rho must be >= 1");
  const size_t nb = series.front().size();
  for (const auto& row : series)
    if (row.size() != nb)
      throw std::invalid_argument("chemin_lerner_norm: ragged series");
  std::vector<double> per_block(nb);
  for (size_t blk = 0; blk < nb; ++blk) {
    if (std::isinf(rho)) {
      double best = 0.0;
      for (const auto& row : series) best = std::max(best, row[blk]);
      per_block[blk] = best;
    } else {
      per_block[blk] = std::pow(trapezoid(series, blk, dt, rho), 1.0 / rho);
    }
  }
  return compose_block_norms(per_block, bp.s, bp.r);
}

double signed_power(double x, double q) {
  if (x == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(x), q), x);
}

std::vector<double> dissipation_blocks(const Distribution& g, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("dissipation_blocks: p < 1");
  const auto& part = DyadicPartition::for_grid(g.n());
  const ConfigGrid& grid = g.grid();
  const int nb = part.block_count();
  const std::int64_t ps = g.plane_size();
  const std::int64_t np = g.planes();
  const double q = 0.5 * p;
  const double cell = kTau * kTau / static_cast<double>(ps);

  constexpr std::int64_t kTile = 64;
  const std::int64_t tiles = (ps + kTile - 1) / kTile;
  std::vector<double> out(nb);
  for (int blk = 0; blk < nb; ++blk) {
    const Distribution blocked = lp_block(g, blk - 1);
    std::vector<double> per_tile(tiles, 0.0);
    parallel_for(tiles, [&](std::int64_t t) {
      const std::int64_t x0 = t * kTile;
      const int count = static_cast<int>(std::min(kTile, ps - x0));
      std::vector<double> tile(np * count);
      std::vector<double> slab(np);
      blocked.gather_x_tile(x0, count, tile.data());
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
    out[blk] = cell * deterministic_sum(per_tile);
  }
  return out;
}

double e_tilde_from_series(const std::vector<std::vector<double>>& series,
                           double dt, const BesovParams& bp) {
  bp.validate();
  if (series.empty() || series.front().empty())
    throw std::invalid_argument("e_tilde_from_series: empty series");
  const size_t nb = series.front().size();
  std::vector<double> per_block(nb);
  for (size_t blk = 0; blk < nb; ++blk)
    per_block[blk] = std::pow(trapezoid(series, blk, dt, 1.0), 1.0 / bp.p);
  return compose_block_norms(per_block, bp.s, bp.r);
}

double e_tilde_norm(std::span<const Distribution> history, double dt,
                    const BesovParams& bp) {
  if (history.empty())
    throw std::invalid_argument("e_tilde_norm: empty history");
  std::vector<std::vector<double>> series;
  series.reserve(history.size());
  for (const auto& snap : history)
    series.push_back(dissipation_blocks(snap, bp.p));
  return e_tilde_from_series(series, dt, bp);
}

Distribution commutator(const SpectralField& v, const Distribution& g, int j) {
  const auto& part = DyadicPartition::for_grid(g.n());
  check_block_range(part, j, 0);
  if (v.n() != g.n())
    throw std::invalid_argument("commutator: grid size mismatch");
  if (v.components() != 2)
    throw std::invalid_argument("commutator: v must be a vector field");
  if (v.divergence_linf() > 1e-8)
    throw std::invalid_argument("commutator: v is not divergence-free");

  const int n = g.n();
  const Fft2d& fft = fft_for(n);
  const std::int64_t nn = g.plane_size();
  const std::int64_t np = g.planes();
  const std::int64_t pairs = (np + 1) / 2;
  const auto& mask = part.mask(j);

  const std::vector<double> vx = v.to_physical(0);
  const std::vector<double> vy = v.to_physical(1);

  // Nyquist-zeroed spectral derivative multipliers, odd under lattice
  // negation so packed plane pairs stay separable.
  std::vector<double> kx(nn), ky(nn);
  for (int iy = 0; iy < n; ++iy) {
    const int wy = iy == n / 2 ? 0 : wavenumber(iy, n);
    for (int ix = 0; ix < n; ++ix) {
      const int wx = ix == n / 2 ? 0 : wavenumber(ix, n);
      kx[static_cast<std::int64_t>(iy) * n + ix] = wx;
      ky[static_cast<std::int64_t>(iy) * n + ix] = wy;
    }
  }

  Distribution out(n, g.grid_ptr());
  const double scale = 1.0 / static_cast<double>(nn);
  parallel_for(pairs, [&](std::int64_t q) {
    const std::int64_t a = 2 * q;
    const std::int64_t b = std::min(a + 1, np - 1);
    std::vector<cplx> hat(nn), t1(nn), dx(nn), dy(nn), w(nn);
    load_pair(g, a, b, hat.data());
    fft.forward(hat.data());

    // v . grad of the blocked planes.
    for (std::int64_t i = 0; i < nn; ++i) {
      const cplx m = mask[i] * hat[i];
      dx[i] = cplx(0.0, kx[i]) * m;
      dy[i] = cplx(0.0, ky[i]) * m;
    }
    fft.backward(dx.data());
    fft.backward(dy.data());
    for (std::int64_t i = 0; i < nn; ++i)
      t1[i] = scale * (vx[i] * dx[i] + vy[i] * dy[i]);

    // Blocked v . grad of the raw planes.
    for (std::int64_t i = 0; i < nn; ++i) {
      dx[i] = cplx(0.0, kx[i]) * hat[i];
      dy[i] = cplx(0.0, ky[i]) * hat[i];
    }
    fft.backward(dx.data());
    fft.backward(dy.data());
    for (std::int64_t i = 0; i < nn; ++i)
      w[i] = scale * (vx[i] * dx[i] + vy[i] * dy[i]);
    fft.forward(w.data());
    for (std::int64_t i = 0; i < nn; ++i) w[i] *= mask[i] * scale;
    fft.backward(w.data());

    for (std::int64_t i = 0; i < nn; ++i) t1[i] -= w[i];
    store_pair(out, a, b, t1.data(), 1.0);
  });
  return out;
}

}  // namespace fene
