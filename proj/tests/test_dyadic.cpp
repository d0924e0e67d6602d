#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "fene/dyadic.hpp"
#include "fene/fft.hpp"

using namespace fene;

TEST_SUITE("dyadic") {

TEST_CASE("radial profile hits its plateaus and stays monotone") {
  CHECK(DyadicPartition::chi(0.0) == 1.0);
  CHECK(DyadicPartition::chi(0.75) == 1.0);
  CHECK(DyadicPartition::chi(4.0 / 3.0) == 0.0);
  CHECK(DyadicPartition::chi(10.0) == 0.0);
  double prev = 1.0;
  for (int i = 1; i <= 40; ++i) {
    const double r = 0.75 + (4.0 / 3.0 - 0.75) * i / 40.0;
    const double v = DyadicPartition::chi(r);
    CHECK(v <= prev + 1e-15);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    prev = v;
  }
}

TEST_CASE("ring profile is the telescoping difference") {
  for (double r : {0.3, 0.8, 1.0, 1.2, 1.5, 2.0, 2.5, 3.0}) {
    const double expect =
        DyadicPartition::chi(r / 2.0) - DyadicPartition::chi(r);
    CHECK(DyadicPartition::phi(r) == doctest::Approx(expect).epsilon(1e-15));
  }
  // Support: phi vanishes outside [3/4, 8/3] and is exactly one on
  // [4/3, 3/2], where chi(r/2) = 1 and chi(r) = 0.
  CHECK(DyadicPartition::phi(0.74) == 0.0);
  CHECK(DyadicPartition::phi(8.0 / 3.0) == 0.0);
  CHECK(DyadicPartition::phi(1.4) == 1.0);
  CHECK(DyadicPartition::phi(1.0) > 0.0);
  CHECK(DyadicPartition::phi(1.0) < 1.0);
}

TEST_CASE("block count tracks the lattice radius") {
  CHECK(DyadicPartition::for_grid(64).j_max() == 5);
  CHECK(DyadicPartition::for_grid(128).j_max() == 6);
  CHECK(DyadicPartition::for_grid(64).block_count() == 7);
}

TEST_CASE("masks sum to one at every lattice point") {
  for (int n : {16, 64}) {
    const DyadicPartition& part = DyadicPartition::for_grid(n);
    std::vector<double> sum(static_cast<size_t>(n) * n, 0.0);
    for (int j = -1; j <= part.j_max(); ++j) {
      const auto& m = part.mask(j);
      for (size_t i = 0; i < sum.size(); ++i) sum[i] += m[i];
    }
    for (double v : sum) CHECK(std::abs(v - 1.0) < 1e-12);
  }
}

TEST_CASE("blocks two apart have disjoint supports") {
  const DyadicPartition& part = DyadicPartition::for_grid(64);
  for (int j = -1; j <= part.j_max(); ++j)
    for (int l = j + 2; l <= part.j_max(); ++l) {
      const auto& a = part.mask(j);
      const auto& b = part.mask(l);
      double overlap = 0.0;
      for (size_t i = 0; i < a.size(); ++i) overlap += a[i] * b[i];
      CHECK(overlap == 0.0);
    }
}

TEST_CASE("each ring mask is one on its pure annulus") {
  const int n = 64;
  const DyadicPartition& part = DyadicPartition::for_grid(n);
  for (int j = 0; j + 2 <= part.j_max(); ++j) {
    const auto& m = part.mask(j);
    const double lo = 4.0 / 3.0 * std::pow(2.0, j);
    const double hi = 1.5 * std::pow(2.0, j);
    int hits = 0;
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const double kx = wavenumber(ix, n);
        const double ky = wavenumber(iy, n);
        const double rad = std::hypot(kx, ky);
        if (rad >= lo && rad <= hi) {
          CHECK(m[static_cast<size_t>(iy) * n + ix] ==
                doctest::Approx(1.0).epsilon(1e-14));
          ++hits;
        }
      }
    CHECK(hits > 0);
  }
}

TEST_CASE("lowpass telescopes the partial sums") {
  const int n = 32;
  const DyadicPartition& part = DyadicPartition::for_grid(n);

  // S_{-1} equals chi on the unit scale; j = j_max+1 is the identity.
  const auto s_bottom = part.lowpass(-1);
  const auto id = part.lowpass(part.j_max() + 1);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const size_t i = static_cast<size_t>(iy) * n + ix;
      const double rad = std::hypot(wavenumber(ix, n), wavenumber(iy, n));
      CHECK(s_bottom[i] ==
            doctest::Approx(DyadicPartition::chi(rad / 0.5)).epsilon(1e-14));
      CHECK(id[i] == doctest::Approx(1.0).epsilon(1e-14));
    }

  // lowpass(j+1) - lowpass(j) reproduces block j.
  for (int j = 0; j <= part.j_max(); ++j) {
    const auto lo = part.lowpass(j);
    const auto hi = part.lowpass(j + 1);
    const auto& m = part.mask(j);
    for (size_t i = 0; i < m.size(); ++i)
      CHECK(hi[i] - lo[i] == doctest::Approx(m[i]).epsilon(1e-13));
  }
}

TEST_CASE("shared instances are cached per grid size") {
  const DyadicPartition& a = DyadicPartition::for_grid(64);
  const DyadicPartition& b = DyadicPartition::for_grid(64);
  CHECK(&a == &b);
}

TEST_CASE("binary cache round trips") {
  const DyadicPartition& part = DyadicPartition::for_grid(16);
  const std::string path =
      (std::filesystem::temp_directory_path() / "fene_dyadic_cache.bin")
          .string();
  part.save(path);
  DyadicPartition loaded = DyadicPartition::load(path);
  std::remove(path.c_str());

  CHECK(loaded.n() == part.n());
  CHECK(loaded.j_max() == part.j_max());
  for (int j = -1; j <= part.j_max(); ++j) {
    const auto& a = part.mask(j);
    const auto& b = loaded.mask(j);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  }
}

}  // TEST_SUITE
