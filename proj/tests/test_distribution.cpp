#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include "fene/distribution.hpp"

using namespace fene;

namespace {

const double kPi = std::numbers::pi;

std::shared_ptr<const ConfigGrid> small_grid(double k = 2.0) {
  return std::make_shared<const ConfigGrid>(8, 8, k);
}

Distribution random_dist(int n, std::shared_ptr<const ConfigGrid> grid,
                         std::uint64_t seed) {
  Distribution g(n, grid);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.1, 2.0);
  for (double& v : g.values()) v = dist(rng);
  return g;
}

}  // namespace

TEST_SUITE("distribution") {

TEST_CASE("equilibrium mass and extremes") {
  const int n = 8;
  Distribution eq = Distribution::equilibrium(n, small_grid());
  CHECK(eq.global_mass() ==
        doctest::Approx(4.0 * kPi * kPi).epsilon(1e-13));
  CHECK(eq.min_value() == 1.0);
  CHECK(eq.all_finite());
  auto mass = eq.mass_field();
  REQUIRE(static_cast<int>(mass.size()) == n * n);
  for (double m : mass) CHECK(m == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("weighted norm of the unit density") {
  const int n = 8;
  Distribution eq = Distribution::equilibrium(n, small_grid());
  for (double p : {1.0, 2.0, 4.0})
    CHECK(eq.weighted_lp_norm(p) ==
          doctest::Approx(std::pow(4.0 * kPi * kPi, 1.0 / p))
              .epsilon(1e-13));
}

TEST_CASE("non-finite values are detected") {
  const int n = 8;
  Distribution g = Distribution::equilibrium(n, small_grid());
  CHECK(g.all_finite());
  g.values()[17] = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(g.all_finite());
  g.values()[17] = std::numeric_limits<double>::infinity();
  CHECK_FALSE(g.all_finite());
}

TEST_CASE("min_value scans every plane") {
  const int n = 8;
  Distribution g = Distribution::equilibrium(n, small_grid());
  g.plane(g.planes() - 1)[5] = -0.25;
  CHECK(g.min_value() == -0.25);
}

TEST_CASE("tile gather and scatter are mutually inverse") {
  const int n = 8;
  auto grid = small_grid();
  Distribution g = random_dist(n, grid, 31);
  Distribution h = g;

  const int count = 5;
  const std::int64_t x0 = 13;
  std::vector<double> tile(static_cast<size_t>(g.planes()) * count);
  g.gather_x_tile(x0, count, tile.data());

  // Layout: tile[node * count + t] is plane node at column x0 + t.
  for (std::int64_t node = 0; node < g.planes(); ++node)
    for (int t = 0; t < count; ++t)
      CHECK(tile[static_cast<size_t>(node) * count + t] ==
            g.plane(node)[x0 + t]);

  for (auto& v : tile) v *= 2.0;
  h.scatter_x_tile(x0, count, tile.data());
  for (std::int64_t node = 0; node < g.planes(); ++node)
    for (std::int64_t x = 0; x < g.plane_size(); ++x) {
      const double expect = (x >= x0 && x < x0 + count)
                                ? 2.0 * g.plane(node)[x]
                                : g.plane(node)[x];
      CHECK(h.plane(node)[x] == expect);
    }
}

TEST_CASE("snapshot round trip is bitwise and layout-stable") {
  const int n = 8;
  auto grid = small_grid(2.5);
  Distribution g = random_dist(n, grid, 32);
  const std::string path =
      (std::filesystem::temp_directory_path() / "fene_dist_roundtrip.dist")
          .string();
  g.save(path, 1.375);
  auto [h, time] = Distribution::load(path);

  CHECK(time == 1.375);
  CHECK(h.n() == n);
  CHECK(h.grid().n_r() == 8);
  CHECK(h.grid().n_theta() == 8);
  CHECK(h.grid().k() == 2.5);
  auto a = g.values();
  auto b = h.values();
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

  // The serialized stream is x-major: with the header skipped, sample
  // index x * nodes + node.
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  in.seekg(3 * 4 + 2 * 8);
  std::vector<double> raw(a.size());
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size() * sizeof(double)));
  REQUIRE(in.gcount() ==
          static_cast<std::streamsize>(raw.size() * sizeof(double)));
  in.close();
  std::remove(path.c_str());
  const std::int64_t nodes = g.planes();
  for (std::int64_t x = 0; x < g.plane_size(); ++x)
    for (std::int64_t node = 0; node < nodes; ++node)
      CHECK(raw[static_cast<size_t>(x) * nodes + node] ==
            g.plane(node)[x]);
}

TEST_CASE("global mass weights cells not samples") {
  const int n = 8;
  auto grid = small_grid();
  // g nonzero only on the innermost ring: mass = (2pi)^2 * n_theta * wpsi(0).
  Distribution g(n, grid);
  for (int m = 0; m < grid->n_theta(); ++m) {
    double* plane = g.plane(m);
    for (std::int64_t x = 0; x < g.plane_size(); ++x) plane[x] = 1.0;
  }
  const double expect =
      4.0 * kPi * kPi * grid->n_theta() * grid->wpsi(0);
  CHECK(g.global_mass() == doctest::Approx(expect).epsilon(1e-13));
}

}  // TEST_SUITE
