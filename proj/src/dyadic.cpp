#include "fene/dyadic.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "fene/fft.hpp"
#include "fene/io.hpp"

namespace fene {

namespace {

constexpr double kInner = 0.75;       // chi == 1 inside this radius
constexpr double kOuter = 4.0 / 3.0;  // chi == 0 outside this radius

double bump(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return std::exp(-1.0 / (t * (1.0 - t)));
}

// Cumulative integral of the bump on a fixed knot table, refined inside a
// knot interval by 5-point Gauss-Legendre. Deterministic to round-off.
class SmoothStep {
 public:
  SmoothStep() {
    double acc = 0.0;
    cum_[0] = 0.0;
    for (int i = 0; i < kIntervals; ++i) {
      const double a = static_cast<double>(i) / kIntervals;
      const double b = static_cast<double>(i + 1) / kIntervals;
      acc += gauss(a, b);
      cum_[i + 1] = acc;
    }
    total_ = acc;
  }

  double operator()(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double pos = t * kIntervals;
    int i = static_cast<int>(pos);
    if (i >= kIntervals) i = kIntervals - 1;
    const double a = static_cast<double>(i) / kIntervals;
    return (cum_[i] + gauss(a, t)) / total_;
  }

 private:
  static constexpr int kIntervals = 2048;

  static double gauss(double a, double b) {
    static constexpr std::array<double, 5> x = {
        -0.9061798459386640, -0.5384693101056831, 0.0,
        0.5384693101056831, 0.9061798459386640};
    static constexpr std::array<double, 5> w = {
        0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
        0.4786286704993665, 0.2369268850561891};
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double s = 0.0;
    for (int q = 0; q < 5; ++q) s += w[q] * bump(mid + half * x[q]);
    return half * s;
  }

  std::array<double, kIntervals + 1> cum_{};
  double total_ = 0.0;
};

const SmoothStep& smooth_step() {
  static SmoothStep s;
  return s;
}

}  // namespace

double DyadicPartition::chi(double radius) {
  if (radius <= kInner) return 1.0;
  if (radius >= kOuter) return 0.0;
  return 1.0 - smooth_step()((radius - kInner) / (kOuter - kInner));
}

double DyadicPartition::phi(double radius) {
  return chi(0.5 * radius) - chi(radius);
}

DyadicPartition::DyadicPartition(int n) : n_(n) {
  if (n < 8 || (n & (n - 1)) != 0)
    throw std::invalid_argument("DyadicPartition: n must be a power of two >= 8");
  int lg = 0;
  while ((1 << (lg + 1)) <= n) ++lg;
  j_max_ = lg - 1;
  masks_.resize(block_count());
  for (int b = 0; b < block_count(); ++b)
    masks_[b].assign(static_cast<size_t>(n) * n, 0.0);
  for (int iy = 0; iy < n; ++iy) {
    const double ky = wavenumber(iy, n);
    for (int ix = 0; ix < n; ++ix) {
      const double kx = wavenumber(ix, n);
      const double r = std::hypot(kx, ky);
      const size_t idx = static_cast<size_t>(iy) * n + ix;
      masks_[0][idx] = chi(r);
      for (int j = 0; j <= j_max_; ++j)
        masks_[j + 1][idx] = phi(r / static_cast<double>(1 << j));
    }
  }
}

const DyadicPartition& DyadicPartition::for_grid(int n) {
  static std::mutex m;
  static std::map<int, std::unique_ptr<DyadicPartition>> cache;
  std::lock_guard<std::mutex> lock(m);
  auto it = cache.find(n);
  if (it == cache.end())
    it = cache.emplace(n, std::unique_ptr<DyadicPartition>(new DyadicPartition(n))).first;
  return *it->second;
}

const std::vector<double>& DyadicPartition::mask(int j) const {
  if (j < -1 || j > j_max_)
    throw std::invalid_argument("DyadicPartition::mask: block index out of range");
  return masks_[j + 1];
}

std::vector<double> DyadicPartition::lowpass(int j) const {
  if (j < -1 || j > j_max_ + 1)
    throw std::invalid_argument("DyadicPartition::lowpass: index out of range");
  std::vector<double> out(static_cast<size_t>(n_) * n_, 0.0);
  const double inv = 1.0 / std::ldexp(1.0, j);
  for (int iy = 0; iy < n_; ++iy) {
    const double ky = wavenumber(iy, n_);
    for (int ix = 0; ix < n_; ++ix) {
      const double kx = wavenumber(ix, n_);
      out[static_cast<size_t>(iy) * n_ + ix] = chi(std::hypot(kx, ky) * inv);
    }
  }
  return out;
}

void DyadicPartition::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("DyadicPartition::save: cannot open " + path);
  io::write_u32(f, static_cast<std::uint32_t>(n_));
  io::write_u32(f, static_cast<std::uint32_t>(block_count()));
  for (const auto& m : masks_) io::write_f64_array(f, m.data(), m.size());
  if (!f) throw std::runtime_error("DyadicPartition::save: write failed");
}

DyadicPartition DyadicPartition::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("DyadicPartition::load: cannot open " + path);
  DyadicPartition p;
  p.n_ = static_cast<int>(io::read_u32(f));
  const int blocks = static_cast<int>(io::read_u32(f));
  if (p.n_ < 8 || blocks < 2)
    throw std::runtime_error("DyadicPartition::load: corrupt header");
  p.j_max_ = blocks - 2;
  p.masks_.resize(blocks);
  for (auto& m : p.masks_) {
    m.resize(static_cast<size_t>(p.n_) * p.n_);
    io::read_f64_array(f, m.data(), m.size());
  }
  if (!f) throw std::runtime_error("DyadicPartition::load: truncated file");
  return p;
}

}  // namespace fene
