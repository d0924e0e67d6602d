#ifndef FENE_DYADIC_HPP
#define FENE_DYADIC_HPP

#include <string>
#include <vector>

namespace fene {

/// Dyadic frequency partition sampled on the n-by-n integer lattice.
///
/// The radial profile chi is 1 on |xi| <= 3/4, 0 on |xi| >= 4/3, and steps
/// down smoothly in between through the normalized integral of
/// exp(-1/(t(1-t))). Ring cutoffs are differences phi(xi) = chi(xi/2) -
/// chi(xi), so the family telescopes and
///   chi(xi) + sum_{j=0}^{j_max} phi(xi / 2^j) = 1
/// holds exactly at every lattice point (the lattice radius never exceeds
/// 3/4 * 2^(j_max+1)). Block -1 carries chi, block j >= 0 carries
/// phi(. / 2^j); blocks two or more apart have disjoint supports.
class DyadicPartition {
 public:
  /// Shared instance for grid size n (power of two >= 8), built once.
  static const DyadicPartition& for_grid(int n);

  /// Smooth profile values; exposed for oracle checks.
  static double chi(double radius);
  static double phi(double radius);

  int n() const { return n_; }
  int j_min() const { return -1; }
  int j_max() const { return j_max_; }
  int block_count() const { return j_max_ + 2; }

  /// Multiplier samples of block j, j in [-1, j_max]; row-major (ky, kx).
  const std::vector<double>& mask(int j) const;

  /// Low-frequency multiplier chi(|xi| / 2^j) for the partial sum
  /// S_j = sum_{j' < j} of blocks; j in [-1, j_max + 1]. j = j_max + 1
  /// gives the identity on the lattice.
  std::vector<double> lowpass(int j) const;

  /// Flat binary cache: uint32 n, uint32 block count, then block-major
  /// (j = -1 first), row-major float64 lattice samples, little-endian.
  void save(const std::string& path) const;
  static DyadicPartition load(const std::string& path);

 private:
  explicit DyadicPartition(int n);
  DyadicPartition() = default;

  int n_ = 0;
  int j_max_ = 0;
  std::vector<std::vector<double>> masks_;
};

}  // namespace fene

#endif
