#include "fene/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace fene {

namespace {
// FFTW planning mutates global state; execution does not.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft2d::Fft2d(int n) : n_(n) {
  if (n < 4 || (n & (n - 1)) != 0)
    throw std::invalid_argument("Fft2d: grid size must be a power of two >= 4");
  std::lock_guard<std::mutex> lock(plan_mutex());
  std::vector<std::complex<double>> tmp(static_cast<size_t>(n) * n);
  auto* p = reinterpret_cast<fftw_complex*>(tmp.data());
  plan_fwd_ = fftw_plan_dft_2d(n, n, p, p, FFTW_FORWARD,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_inv_ = fftw_plan_dft_2d(n, n, p, p, FFTW_BACKWARD,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!plan_fwd_ || !plan_inv_) throw std::runtime_error("Fft2d: planning failed");
}

Fft2d::~Fft2d() {
  std::lock_guard<std::mutex> lock(plan_mutex());
  if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  if (plan_inv_) fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
}

void Fft2d::forward(std::complex<double>* a) const {
  auto* p = reinterpret_cast<fftw_complex*>(a);
  fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), p, p);
}

void Fft2d::backward(std::complex<double>* a) const {
  auto* p = reinterpret_cast<fftw_complex*>(a);
  fftw_execute_dft(static_cast<fftw_plan>(plan_inv_), p, p);
}

const Fft2d& fft_for(int n) {
  static std::mutex m;
  static std::map<int, std::unique_ptr<Fft2d>> cache;
  std::lock_guard<std::mutex> lock(m);
  auto it = cache.find(n);
  if (it == cache.end())
    it = cache.emplace(n, std::make_unique<Fft2d>(n)).first;
  return *it->second;
}

namespace ref {

void dft2d(const std::complex<double>* in, std::complex<double>* out, int n,
           int sign) {
  const double tau = 2.0 * std::numbers::pi;
  for (int oy = 0; oy < n; ++oy) {
    for (int ox = 0; ox < n; ++ox) {
      std::complex<double> acc = 0.0;
      for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
          const double phase =
              sign * tau * (static_cast<double>(oy) * iy + static_cast<double>(ox) * ix) / n;
          acc += in[static_cast<size_t>(iy) * n + ix] *
                 std::complex<double>(std::cos(phase), std::sin(phase));
        }
      }
      if (sign > 0) acc /= static_cast<double>(n) * n;
      out[static_cast<size_t>(oy) * n + ox] = acc;
    }
  }
}

}  // namespace ref

}  // namespace fene
