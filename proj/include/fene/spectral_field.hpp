#ifndef FENE_SPECTRAL_FIELD_HPP
#define FENE_SPECTRAL_FIELD_HPP

#include <complex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fene/fft.hpp"

namespace fene {

using cplx = std::complex<double>;

/// Periodic field on [0, 2pi)^2 held as Fourier mode amplitudes, so
/// f(x) = sum_k coef(k) exp(i k.x). Storage is component-major, then
/// row-major over (ky index, kx index) in FFT order. Real-valued fields
/// keep the Hermitian symmetry coef(-k) = conj(coef(k)); every operation
/// in this codebase preserves it.
class SpectralField {
 public:
  SpectralField() = default;
  SpectralField(int n, int components);

  /// values: component-major physical samples, row-major over (y, x).
  static SpectralField from_physical(int n, int components,
                                     std::span<const double> values);

  int n() const { return n_; }
  int components() const { return comps_; }
  std::int64_t modes_per_comp() const {
    return static_cast<std::int64_t>(n_) * n_;
  }

  std::span<cplx> comp(int c);
  std::span<const cplx> comp(int c) const;
  cplx& at(int c, int iy, int ix);
  const cplx& at(int c, int iy, int ix) const;

  /// Physical samples of one component (imaginary parts discarded).
  std::vector<double> to_physical(int c) const;
  void to_physical(int c, double* out) const;

  void scale(double a);
  void axpy(double a, const SpectralField& x);
  void set_zero();
  void zero_mean();

  /// L^2(dx) norm over the torus via Parseval, all components jointly.
  double l2_norm() const;
  /// Rectangle-rule L^p(dx) norm of the pointwise Euclidean magnitude.
  double lp_norm(double p) const;
  /// Max pointwise Euclidean magnitude on the grid.
  double linf_norm() const;

  /// Max |k . coef(k)| over modes, relative to the field scale; zero for
  /// divergence-free two-component fields.
  double divergence_linf() const;
  /// Max |coef(-k) - conj(coef(k))|.
  double hermitian_defect() const;

  /// Snapshot format: uint32 n, uint32 components, float64 time, then
  /// coefficients component-major, row-major over (ky, kx), as (re, im)
  /// float64 little-endian pairs.
  void save(const std::string& path, double time) const;
  static std::pair<SpectralField, double> load(const std::string& path);
  /// Physical samples as plain text, one "x,y,c0,..." row per grid point.
  void save_physical_csv(const std::string& path) const;

 private:
  int n_ = 0;
  int comps_ = 0;
  std::vector<cplx> coef_;
};

SpectralField operator+(const SpectralField& a, const SpectralField& b);
SpectralField operator-(const SpectralField& a, const SpectralField& b);

}  // namespace fene

#endif
