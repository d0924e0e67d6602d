#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "fene/besov.hpp"
#include "fene/dyadic.hpp"
#include "fene/errors.hpp"
#include "fene/experiments.hpp"
#include "fene/fft.hpp"
#include "fene/fluid.hpp"
#include "fene/parallel.hpp"

namespace fene {

namespace {

/// The same function on a finer grid: coefficients copied wavenumber by
/// wavenumber. Exact because embedding never truncates.
SpectralField embed(const SpectralField& f, int n2) {
  const int n = f.n();
  if (n2 == n) return f;
  if (n2 < n) throw std::invalid_argument("embed: target grid is smaller");
  SpectralField out(n2, f.components());
  for (int c = 0; c < f.components(); ++c)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const int ky = wavenumber(iy, n);
        const int kx = wavenumber(ix, n);
        out.at(c, (ky + n2) % n2, (kx + n2) % n2) = f.at(c, iy, ix);
      }
  return out;
}

/// Physical samples of the partial derivative of component c.
std::vector<double> derivative_samples(const SpectralField& f, int c,
                                       int axis) {
  const int n = f.n();
  SpectralField d(n, 1);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const int ky = wavenumber(iy, n);
      const int kx = wavenumber(ix, n);
      if (kx == -n / 2 || ky == -n / 2) continue;
      d.at(0, iy, ix) = cplx(0.0, axis == 0 ? kx : ky) * f.at(c, iy, ix);
    }
  return d.to_physical(0);
}

/// u . grad v assembled in physical space; exact as long as the combined
/// bandwidth of the factors stays below the grid Nyquist.
SpectralField advection_term(const SpectralField& u, const SpectralField& v) {
  const int n = u.n();
  const std::vector<double> ux = u.to_physical(0);
  const std::vector<double> uy = u.to_physical(1);
  std::vector<double> packed(static_cast<std::size_t>(v.components()) * n * n);
  for (int c = 0; c < v.components(); ++c) {
    const std::vector<double> dx = derivative_samples(v, c, 0);
    const std::vector<double> dy = derivative_samples(v, c, 1);
    double* out = packed.data() + static_cast<std::size_t>(c) * n * n;
    for (std::size_t i = 0; i < dx.size(); ++i)
      out[i] = ux[i] * dx[i] + uy[i] * dy[i];
  }
  return SpectralField::from_physical(n, v.components(), packed);
}

SpectralField pointwise_product(const SpectralField& a,
                                const SpectralField& b) {
  const int n = a.n();
  const std::vector<double> pa = a.to_physical(0);
  const std::vector<double> pb = b.to_physical(0);
  std::vector<double> prod(pa.size());
  for (std::size_t i = 0; i < pa.size(); ++i) prod[i] = pa[i] * pb[i];
  return SpectralField::from_physical(n, 1, prod);
}

SpectralField gradient_tensor(const SpectralField& v) {
  const int n = v.n();
  std::vector<double> packed;
  packed.reserve(4ull * n * n);
  for (int c = 0; c < 2; ++c)
    for (int axis = 0; axis < 2; ++axis) {
      const std::vector<double> d = derivative_samples(v, c, axis);
      packed.insert(packed.end(), d.begin(), d.end());
    }
  return SpectralField::from_physical(n, 4, packed);
}

/// Density 1 + amp w(x) r cos(theta); odd in theta, so the per-x mass
/// stays exactly 1 on the symmetric angular grid.
Distribution modulated_density(int n, std::shared_ptr<const ConfigGrid> grid,
                               const SpectralField& w, double amp) {
  const std::vector<double> w_phys = w.to_physical(0);
  Distribution g(n, std::move(grid));
  const ConfigGrid& cg = g.grid();
  const std::int64_t ps = g.plane_size();
  parallel_for(g.planes(), [&](std::int64_t node) {
    const int i = static_cast<int>(node) / cg.n_theta();
    const int m = static_cast<int>(node) % cg.n_theta();
    const double h = cg.r(i) * cg.cos_th(m);
    double* plane = g.plane(node);
    for (std::int64_t x = 0; x < ps; ++x)
      plane[x] = 1.0 + amp * w_phys[x] * h;
  });
  return g;
}

double unit_real(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Closed-form test density on the ball, evaluable on any radial grid.
struct BallShape {
  std::array<double, 3> amp{};
  std::array<int, 3> mode{};
  std::array<double, 3> phase{};

  static BallShape draw(std::mt19937_64& rng) {
    BallShape s;
    for (int q = 0; q < 3; ++q) {
      s.amp[q] = 0.2 * (2.0 * unit_real(rng) - 1.0);
      s.mode[q] = 1 + static_cast<int>(unit_real(rng) * 3.0);
      s.phase[q] = 2.0 * std::numbers::pi * unit_real(rng);
    }
    return s;
  }

  std::vector<double> sample(const ConfigGrid& grid) const {
    std::vector<double> g(grid.nodes());
    for (int i = 0; i < grid.n_r(); ++i)
      for (int m = 0; m < grid.n_theta(); ++m) {
        const double r = grid.r(i);
        const double th = 2.0 * std::numbers::pi * (m + 0.5) / grid.n_theta();
        double v = 1.0;
        for (int q = 0; q < 3; ++q)
          v += amp[q] * std::pow(r, mode[q]) *
               std::cos(mode[q] * th + phase[q]);
        g[static_cast<std::size_t>(i) * grid.n_theta() + m] = v;
      }
    return g;
  }
};

double z_ratio(const ConfigGrid& grid, const BallShape& shape, double p) {
  const auto [lhs, rhs] = grid.z_functional(shape.sample(grid), p);
  return rhs > 0.0 ? lhs / rhs : std::numeric_limits<double>::infinity();
}

struct RatioTrack {
  double coarse = 0.0;
  double fine = 0.0;
  void add(double c, double f) {
    coarse = std::max(coarse, c);
    fine = std::max(fine, f);
  }
  LemmaReport report(const std::string& name) const {
    LemmaReport rep;
    rep.name = name;
    rep.max_ratio = coarse;
    rep.refined_ratio = fine;
    rep.finite = std::isfinite(coarse) && std::isfinite(fine);
    return rep;
  }
};

}  // namespace

double product_law_ratio(const SpectralField& a, const SpectralField& b,
                         const BesovParams& bp) {
  bp.validate();
  if (!(bp.s > 2.0 / bp.p))
    throw HypothesisViolation("product_law_ratio: needs s > 2/p");
  if (a.components() != 1 || b.components() != 1)
    throw std::invalid_argument("product_law_ratio: scalar fields only");
  const double lhs = besov_norm(pointwise_product(a, b), bp);
  const double rhs = a.linf_norm() * besov_norm(b, bp) +
                     besov_norm(a, bp) * b.linf_norm();
  return lhs / rhs;
}

double pressure_bound_ratio(const SpectralField& u, const SpectralField& v,
                            double s, double sigma, double p, double r) {
  BesovParams high{s, p, r};
  BesovParams low{sigma, p, r};
  high.validate();
  low.validate();
  if (!(sigma <= s))
    throw std::invalid_argument("pressure_bound_ratio: needs sigma <= s");
  if (u.components() != 2 || v.components() != 2)
    throw std::invalid_argument("pressure_bound_ratio: velocity fields only");
  SpectralField adv = advection_term(u, v);
  SpectralField solenoidal = adv;
  leray_project(solenoidal);
  const double lhs = besov_norm(adv - solenoidal, low);
  const double rhs = std::min(besov_norm(u, low) * besov_norm(v, high),
                              besov_norm(u, high) * besov_norm(v, low));
  return lhs / rhs;
}

double commutator_bound_ratio(const SpectralField& v, const Distribution& g,
                              const BesovParams& bp) {
  bp.validate();
  if (!(bp.s > 1.0 + 2.0 / bp.p))
    throw HypothesisViolation("commutator_bound_ratio: needs sigma > 1 + 2/p");
  const auto& part = DyadicPartition::for_grid(v.n());
  std::vector<double> blocks(part.block_count());
  for (int j = part.j_min(); j <= part.j_max(); ++j)
    blocks[j + 1] = commutator(v, g, j).weighted_lp_norm(bp.p);
  const double lhs = compose_block_norms(blocks, bp.s, bp.r);
  const double rhs = besov_norm(gradient_tensor(v), bp.shifted(-1.0)) *
                     besov_lp_norm(g, bp);
  return lhs / rhs;
}

double transport_bound_ratio(const SpectralField& v, const SpectralField& f0,
                             const SpectralField& src, double nu, double sigma,
                             double p, double r, double t_end, double dt) {
  BesovParams bp{sigma, p, r};
  bp.validate();
  if (!(nu >= 0.0) || !(dt > 0.0) || !(t_end >= dt))
    throw std::invalid_argument("transport_bound_ratio: bad time parameters");
  const int steps = static_cast<int>(std::llround(t_end / dt));
  SpectralField f = f0;
  std::vector<std::vector<double>> series;
  series.push_back(block_lp_norms(f, p));
  for (int m = 0; m < steps; ++m) {
    f = transport_diffusion_step(f, v, src, nu, dt);
    series.push_back(block_lp_norms(f, p));
  }
  const double lhs = chemin_lerner_norm(
      series, dt, std::numeric_limits<double>::infinity(), bp);
  const double rhs = besov_norm(f0, bp) + t_end * besov_norm(src, bp);
  return lhs / rhs;
}

std::vector<LemmaReport> check_lemmas(const SolverConfig& cfg,
                                      std::uint64_t seed, int n_samples) {
  cfg.validate();
  if (n_samples < 1)
    throw std::invalid_argument("check_lemmas: n_samples < 1");
  const double s = cfg.besov.s;
  const double p = cfg.besov.p;
  const double r = cfg.besov.r;
  if (!(s > 2.0 + 2.0 / p))
    throw HypothesisViolation(
        "check_lemmas: commutator hypothesis needs s > 2 + 2/p");
  if (!((p - 1.0) * cfg.polymer.k > 1.0))
    throw HypothesisViolation("check_lemmas: needs (p-1) k > 1");
  const double sigma = s - 1.0;
  const int n = cfg.n;
  const int n2 = 2 * n;
  const BesovParams bp = cfg.besov;

  // The commutator acts per configuration node, so a coarse ball grid
  // samples it adequately; the singular moment refines radially instead.
  const auto ball =
      std::make_shared<const ConfigGrid>(8, 8, cfg.polymer.k);
  const auto z_grid = std::make_shared<const ConfigGrid>(
      cfg.n_r, cfg.n_theta, cfg.polymer.k);
  const auto z_fine = std::make_shared<const ConfigGrid>(
      2 * cfg.n_r, cfg.n_theta, cfg.polymer.k);
  const std::array<double, 8> nu_ladder = {0.0,    0x1p-8, 0x1p-7, 0x1p-6,
                                           0x1p-5, 0x1p-4, 0x1p-3, 0x1p-2};
  constexpr double kTransportT = 0.2;
  constexpr double kTransportDt = 4e-3;

  RatioTrack product, press, zmom, comm, transport;
  for (int i = 0; i < n_samples; ++i) {
    const std::uint64_t base = seed + 1000ull * static_cast<std::uint64_t>(i);

    const SpectralField a = random_field(n, 1, s, base + 1);
    const SpectralField b = random_field(n, 1, s, base + 2);
    product.add(product_law_ratio(a, b, bp),
                product_law_ratio(embed(a, n2), embed(b, n2), bp));

    const SpectralField u = random_field(n, 2, s, base + 3);
    const SpectralField v = random_field(n, 2, s, base + 4);
    press.add(pressure_bound_ratio(u, v, s, sigma, p, r),
              pressure_bound_ratio(embed(u, n2), embed(v, n2), s, sigma, p, r));

    std::mt19937_64 rng(base + 5);
    const BallShape shape = BallShape::draw(rng);
    zmom.add(z_ratio(*z_grid, shape, p), z_ratio(*z_fine, shape, p));

    const SpectralField vc = random_field(n, 2, s, base + 6);
    const SpectralField w = random_field(n, 1, sigma, base + 7);
    const std::vector<double> w_phys = w.to_physical(0);
    double w_max = 0.0;
    for (double x : w_phys) w_max = std::max(w_max, std::abs(x));
    const double amp = 0.4 / w_max;
    const BesovParams bc{sigma, p, r};
    comm.add(
        commutator_bound_ratio(vc, modulated_density(n, ball, w, amp), bc),
        commutator_bound_ratio(embed(vc, n2),
                               modulated_density(n2, ball, embed(w, n2), amp),
                               bc));

    const SpectralField vt = random_field(n, 2, sigma + 1.0, base + 8);
    const SpectralField f0 = random_field(n, 1, sigma, base + 9);
    const SpectralField fs = random_field(n, 1, sigma, base + 10);
    const double nu = nu_ladder[i % nu_ladder.size()];
    transport.add(
        transport_bound_ratio(vt, f0, fs, nu, sigma, p, r, kTransportT,
                              kTransportDt),
        transport_bound_ratio(embed(vt, n2), embed(f0, n2), embed(fs, n2), nu,
                              sigma, p, r, kTransportT, kTransportDt));
  }

  return {product.report("product_law"), press.report("pressure_gradient"),
          zmom.report("singular_moment"), comm.report("advection_commutator"),
          transport.report("transport_diffusion")};
}

std::string lemma_report_json(std::span<const LemmaReport> reports) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& rep : reports)
    j.push_back({{"name", rep.name},
                 {"max_ratio", rep.max_ratio},
                 {"refined_ratio", rep.refined_ratio},
                 {"finite", rep.finite}});
  return j.dump(2) + "\n";
}

}  // namespace fene
