#include "fene/spectral_field.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fene/io.hpp"
#include "fene/parallel.hpp"

namespace fene {

SpectralField::SpectralField(int n, int components)
    : n_(n), comps_(components) {
  if (components < 1) throw std::invalid_argument("SpectralField: components < 1");
  coef_.assign(static_cast<size_t>(components) * n * n, cplx(0.0, 0.0));
  (void)fft_for(n);
}

SpectralField SpectralField::from_physical(int n, int components,
                                           std::span<const double> values) {
  if (values.size() != static_cast<size_t>(components) * n * n)
    throw std::invalid_argument("from_physical: size mismatch");
  SpectralField f(n, components);
  const Fft2d& fft = fft_for(n);
  const double scale = 1.0 / (static_cast<double>(n) * n);
  for (int c = 0; c < components; ++c) {
    auto dst = f.comp(c);
    const double* src = values.data() + static_cast<size_t>(c) * n * n;
    for (std::int64_t i = 0; i < f.modes_per_comp(); ++i) dst[i] = src[i];
    fft.forward(dst.data());
    for (auto& z : dst) z *= scale;
  }
  return f;
}

std::span<cplx> SpectralField::comp(int c) {
  return {coef_.data() + static_cast<size_t>(c) * n_ * n_,
          static_cast<size_t>(n_) * n_};
}

std::span<const cplx> SpectralField::comp(int c) const {
  return {coef_.data() + static_cast<size_t>(c) * n_ * n_,
          static_cast<size_t>(n_) * n_};
}

cplx& SpectralField::at(int c, int iy, int ix) {
  return coef_[(static_cast<size_t>(c) * n_ + iy) * n_ + ix];
}

const cplx& SpectralField::at(int c, int iy, int ix) const {
  return coef_[(static_cast<size_t>(c) * n_ + iy) * n_ + ix];
}

void SpectralField::to_physical(int c, double* out) const {
  std::vector<cplx> buf(comp(c).begin(), comp(c).end());
  fft_for(n_).backward(buf.data());
  for (std::int64_t i = 0; i < modes_per_comp(); ++i) out[i] = buf[i].real();
}

std::vector<double> SpectralField::to_physical(int c) const {
  std::vector<double> out(static_cast<size_t>(n_) * n_);
  to_physical(c, out.data());
  return out;
}

void SpectralField::scale(double a) {
  for (auto& z : coef_) z *= a;
}

void SpectralField::axpy(double a, const SpectralField& x) {
  if (x.n_ != n_ || x.comps_ != comps_)
    throw std::invalid_argument("axpy: shape mismatch");
  for (size_t i = 0; i < coef_.size(); ++i) coef_[i] += a * x.coef_[i];
}

void SpectralField::set_zero() {
  for (auto& z : coef_) z = cplx(0.0, 0.0);
}

void SpectralField::zero_mean() {
  for (int c = 0; c < comps_; ++c) comp(c)[0] = cplx(0.0, 0.0);
}

double SpectralField::l2_norm() const {
  const double tau = 2.0 * std::numbers::pi;
  double s = 0.0;
  for (const auto& z : coef_) s += std::norm(z);
  return tau * std::sqrt(s);
}

double SpectralField::lp_norm(double p) const {
  if (p < 1.0) throw std::invalid_argument("lp_norm: p < 1");
  const std::int64_t m = modes_per_comp();
  std::vector<double> mag2(m, 0.0);
  std::vector<double> buf(m);
  for (int c = 0; c < comps_; ++c) {
    to_physical(c, buf.data());
    for (std::int64_t i = 0; i < m; ++i) mag2[i] += buf[i] * buf[i];
  }
  const double tau = 2.0 * std::numbers::pi;
  const double cell = (tau / n_) * (tau / n_);
  const double half_p = 0.5 * p;
  double s = parallel_reduce(m, [&](std::int64_t b, std::int64_t e) {
    double acc = 0.0;
    for (std::int64_t i = b; i < e; ++i) acc += std::pow(mag2[i], half_p);
    return acc;
  });
  return std::pow(cell * s, 1.0 / p);
}

double SpectralField::linf_norm() const {
  const std::int64_t m = modes_per_comp();
  std::vector<double> mag2(m, 0.0);
  std::vector<double> buf(m);
  for (int c = 0; c < comps_; ++c) {
    to_physical(c, buf.data());
    for (std::int64_t i = 0; i < m; ++i) mag2[i] += buf[i] * buf[i];
  }
  double mx = 0.0;
  for (std::int64_t i = 0; i < m; ++i) mx = std::max(mx, mag2[i]);
  return std::sqrt(mx);
}

double SpectralField::divergence_linf() const {
  if (comps_ != 2) throw std::invalid_argument("divergence_linf: need 2 components");
  double mx = 0.0;
  double scale = 0.0;
  for (int iy = 0; iy < n_; ++iy) {
    const double ky = wavenumber(iy, n_);
    for (int ix = 0; ix < n_; ++ix) {
      const double kx = wavenumber(ix, n_);
      const cplx d = kx * at(0, iy, ix) + ky * at(1, iy, ix);
      mx = std::max(mx, std::abs(d));
      scale = std::max({scale, std::abs(at(0, iy, ix)) * std::abs(kx),
                        std::abs(at(1, iy, ix)) * std::abs(ky)});
    }
  }
  return scale > 0.0 ? mx / scale : mx;
}

double SpectralField::hermitian_defect() const {
  double mx = 0.0;
  for (int c = 0; c < comps_; ++c) {
    for (int iy = 0; iy < n_; ++iy) {
      const int jy = (n_ - iy) % n_;
      for (int ix = 0; ix < n_; ++ix) {
        const int jx = (n_ - ix) % n_;
        mx = std::max(mx, std::abs(at(c, jy, jx) - std::conj(at(c, iy, ix))));
      }
    }
  }
  return mx;
}

void SpectralField::save(const std::string& path, double time) const {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("SpectralField::save: cannot open " + path);
  io::write_u32(out, static_cast<std::uint32_t>(n_));
  io::write_u32(out, static_cast<std::uint32_t>(comps_));
  io::write_f64(out, time);
  for (const cplx& a : coef_) {
    io::write_f64(out, a.real());
    io::write_f64(out, a.imag());
  }
  if (!out) throw std::runtime_error("SpectralField::save: write failed");
}

std::pair<SpectralField, double> SpectralField::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("SpectralField::load: cannot open " + path);
  const int n = static_cast<int>(io::read_u32(in));
  const int comps = static_cast<int>(io::read_u32(in));
  const double time = io::read_f64(in);
  SpectralField f(n, comps);
  for (cplx& a : f.coef_) {
    const double re = io::read_f64(in);
    const double im = io::read_f64(in);
    a = cplx(re, im);
  }
  if (!in) throw std::runtime_error("SpectralField::load: truncated file");
  return {std::move(f), time};
}

void SpectralField::save_physical_csv(const std::string& path) const {
  std::vector<std::vector<double>> phys(comps_);
  for (int c = 0; c < comps_; ++c) phys[c] = to_physical(c);
  const double tau = 2.0 * std::numbers::pi;
  std::ostringstream body;
  body << "x,y";
  for (int c = 0; c < comps_; ++c) body << ",c" << c;
  body << "\n";
  body.precision(17);
  for (int iy = 0; iy < n_; ++iy) {
    for (int ix = 0; ix < n_; ++ix) {
      body << tau * ix / n_ << "," << tau * iy / n_;
      for (int c = 0; c < comps_; ++c)
        body << "," << phys[c][static_cast<std::int64_t>(iy) * n_ + ix];
      body << "\n";
    }
  }
  io::write_text_file(path, body.str());
}

SpectralField operator+(const SpectralField& a, const SpectralField& b) {
  SpectralField r = a;
  r.axpy(1.0, b);
  return r;
}

SpectralField operator-(const SpectralField& a, const SpectralField& b) {
  SpectralField r = a;
  r.axpy(-1.0, b);
  return r;
}

}  // namespace fene
