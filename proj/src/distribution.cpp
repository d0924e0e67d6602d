#include "fene/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "fene/io.hpp"
#include "fene/parallel.hpp"

namespace fene {

Distribution::Distribution(int n, std::shared_ptr<const ConfigGrid> grid,
                           double fill)
    : n_(n), grid_(std::move(grid)) {
  if (n_ < 4) throw std::invalid_argument("Distribution: n must be >= 4");
  if (!grid_) throw std::invalid_argument("Distribution: null grid");
  data_.assign(planes() * plane_size(), fill);
}

Distribution Distribution::equilibrium(int n,
                                       std::shared_ptr<const ConfigGrid> grid) {
  return Distribution(n, std::move(grid), 1.0);
}

void Distribution::gather_x_tile(std::int64_t x0, int count,
                                 double* out) const {
  const std::int64_t ps = plane_size();
  const std::int64_t np = planes();
  for (std::int64_t node = 0; node < np; ++node) {
    const double* src = data_.data() + node * ps + x0;
    double* dst = out + node * count;
    for (int t = 0; t < count; ++t) dst[t] = src[t];
  }
}

void Distribution::scatter_x_tile(std::int64_t x0, int count,
                                  const double* in) {
  const std::int64_t ps = plane_size();
  const std::int64_t np = planes();
  for (std::int64_t node = 0; node < np; ++node) {
    double* dst = data_.data() + node * ps + x0;
    const double* src = in + node * count;
    for (int t = 0; t < count; ++t) dst[t] = src[t];
  }
}

std::vector<double> Distribution::mass_field() const {
  const std::int64_t ps = plane_size();
  const std::int64_t np = planes();
  std::vector<double> mass(ps, 0.0);
  const auto& wpsi = grid_->wpsi_node();
  parallel_for(ps, [&](std::int64_t x) {
    double s = 0.0;
    for (std::int64_t node = 0; node < np; ++node)
      s += wpsi[node] * data_[node * ps + x];
    mass[x] = s;
  });
  return mass;
}

double Distribution::global_mass() const {
  const auto mass = mass_field();
  const double cell = std::pow(2.0 * std::numbers::pi / n_, 2);
  return cell * deterministic_sum(mass);
}

double Distribution::min_value() const {
  const std::int64_t total = static_cast<std::int64_t>(data_.size());
  const std::int64_t chunk = std::max<std::int64_t>(1, total / 256);
  const std::int64_t pieces = (total + chunk - 1) / chunk;
  std::vector<double> mins(pieces);
  parallel_for(pieces, [&](std::int64_t p) {
    const std::int64_t lo = p * chunk;
    const std::int64_t hi = std::min(total, lo + chunk);
    double m = data_[lo];
    for (std::int64_t i = lo + 1; i < hi; ++i) m = std::min(m, data_[i]);
    mins[p] = m;
  });
  return *std::min_element(mins.begin(), mins.end());
}

bool Distribution::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

double Distribution::weighted_lp_norm(double p) const {
  if (p < 1.0) throw std::invalid_argument("weighted_lp_norm: p must be >= 1");
  const std::int64_t ps = plane_size();
  const std::int64_t np = planes();
  const auto& wpsi = grid_->wpsi_node();
  std::vector<double> per_x(ps, 0.0);
  parallel_for(ps, [&](std::int64_t x) {
    double s = 0.0;
    if (p == 2.0) {
      for (std::int64_t node = 0; node < np; ++node) {
        const double g = data_[node * ps + x];
        s += wpsi[node] * g * g;
      }
    } else {
      for (std::int64_t node = 0; node < np; ++node)
        s += wpsi[node] * std::pow(std::abs(data_[node * ps + x]), p);
    }
    per_x[x] = s;
  });
  const double cell = std::pow(2.0 * std::numbers::pi / n_, 2);
  return std::pow(cell * deterministic_sum(per_x), 1.0 / p);
}

void Distribution::save(const std::string& path, double time) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("Distribution::save: cannot open " + path);
  io::write_u32(out, static_cast<std::uint32_t>(n_));
  io::write_u32(out, static_cast<std::uint32_t>(grid_->n_r()));
  io::write_u32(out, static_cast<std::uint32_t>(grid_->n_theta()));
  io::write_f64(out, grid_->k());
  io::write_f64(out, time);
  const std::int64_t ps = plane_size();
  const std::int64_t np = planes();
  std::vector<double> slab(np);
  for (std::int64_t x = 0; x < ps; ++x) {
    for (std::int64_t node = 0; node < np; ++node)
      slab[node] = data_[node * ps + x];
    io::write_f64_array(out, slab);
  }
  if (!out) throw std::runtime_error("Distribution::save: write failed");
}

std::pair<Distribution, double> Distribution::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("Distribution::load: cannot open " + path);
  const int n = static_cast<int>(io::read_u32(in));
  const int n_r = static_cast<int>(io::read_u32(in));
  const int n_theta = static_cast<int>(io::read_u32(in));
  const double k = io::read_f64(in);
  const double time = io::read_f64(in);
  auto grid = std::make_shared<ConfigGrid>(n_r, n_theta, k);
  Distribution dist(n, grid);
  const std::int64_t ps = dist.plane_size();
  const std::int64_t np = dist.planes();
  std::vector<double> slab(np);
  for (std::int64_t x = 0; x < ps; ++x) {
    io::read_f64_array(in, slab);
    for (std::int64_t node = 0; node < np; ++node)
      dist.data_[node * ps + x] = slab[node];
  }
  if (!in) throw std::runtime_error("Distribution::load: truncated file");
  return {std::move(dist), time};
}

}  // namespace fene
