#ifndef FENE_DISTRIBUTION_HPP
#define FENE_DISTRIBUTION_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fene/config_grid.hpp"

namespace fene {

/// Configuration density on the x-lattice times the polar R-mesh, stored
/// as g = psi / psi_inf. In memory the (r, theta) plane index is outer
/// and x inner, so x-space kernels stream contiguous planes; on disk the
/// order is x-major (see save()).
class Distribution {
 public:
  Distribution() = default;
  Distribution(int n, std::shared_ptr<const ConfigGrid> grid,
               double fill = 0.0);

  /// g == 1 everywhere: psi == psi_inf at every x.
  static Distribution equilibrium(int n, std::shared_ptr<const ConfigGrid> grid);

  int n() const { return n_; }
  const ConfigGrid& grid() const { return *grid_; }
  const std::shared_ptr<const ConfigGrid>& grid_ptr() const { return grid_; }
  std::int64_t planes() const { return grid_ ? grid_->nodes() : 0; }
  std::int64_t plane_size() const {
    return static_cast<std::int64_t>(n_) * n_;
  }

  double* plane(std::int64_t node) { return data_.data() + node * plane_size(); }
  const double* plane(std::int64_t node) const {
    return data_.data() + node * plane_size();
  }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  /// Copies the R-slab of x-columns [x0, x0+count) into out, laid out
  /// out[node * count + t]; scatter writes it back.
  void gather_x_tile(std::int64_t x0, int count, double* out) const;
  void scatter_x_tile(std::int64_t x0, int count, const double* in);

  /// Per-x configuration mass int psi dR, size n*n.
  std::vector<double> mass_field() const;
  /// int int psi dR dx over the torus (Lebesgue dx).
  double global_mass() const;
  double min_value() const;
  bool all_finite() const;

  /// Joint norm ( int_x int_R psi_inf |g|^p )^(1/p), rectangle rule in x.
  double weighted_lp_norm(double p) const;

  /// Snapshot format: uint32 n, uint32 n_r, uint32 n_theta, float64 k,
  /// float64 time, then g samples x-major (row-major over (y, x)),
  /// r-major, theta-minor, float64 little-endian.
  void save(const std::string& path, double time) const;
  static std::pair<Distribution, double> load(const std::string& path);

 private:
  int n_ = 0;
  std::shared_ptr<const ConfigGrid> grid_;
  std::vector<double> data_;
};

}  // namespace fene

#endif
