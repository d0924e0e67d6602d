#ifndef FENE_FFT_HPP
#define FENE_FFT_HPP

#include <complex>

namespace fene {

/// Planned 2D complex transforms on an n-by-n row-major grid. Both
/// directions are unnormalized (backward(forward(a)) == n^2 a); callers
/// own the scaling convention. Plans are built with FFTW_ESTIMATE only,
/// which keeps the chosen algorithm (and hence bit-level output)
/// reproducible between process runs. Both transform calls are safe from
/// concurrent threads on distinct buffers.
class Fft2d {
 public:
  explicit Fft2d(int n);
  ~Fft2d();
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;

  int size() const { return n_; }

  void forward(std::complex<double>* a) const;
  void backward(std::complex<double>* a) const;

 private:
  int n_ = 0;
  void* plan_fwd_ = nullptr;
  void* plan_inv_ = nullptr;
};

/// Shared plan for grid size n, created on first use and kept for the
/// process lifetime.
const Fft2d& fft_for(int n);

/// Signed lattice wavenumber of index i on an n-grid: 0..n/2-1, -n/2..-1.
inline int wavenumber(int i, int n) { return i < n / 2 ? i : i - n; }

namespace ref {
/// Brute-force O(n^4) DFT with the same conventions as Fft2d, used as an
/// independent oracle in tests. sign -1 = forward, +1 = inverse (scaled).
void dft2d(const std::complex<double>* in, std::complex<double>* out, int n,
           int sign);
}  // namespace ref

}  // namespace fene

#endif
