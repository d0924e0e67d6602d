#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "fene/besov.hpp"
#include "fene/spectral_field.hpp"

using namespace fene;
namespace fs = std::filesystem;

namespace {

fs::path binary_path() {
  std::error_code ec;
  const fs::path self = fs::read_symlink("/proc/self/exe", ec);
  if (!ec) {
    const fs::path sibling = self.parent_path() / "fene";
    if (fs::exists(sibling)) return sibling;
  }
  return fs::path("./fene");
}

struct CliRun {
  int exit_code = -1;
  std::string output;
};

CliRun run_cli(const std::string& args) {
  static const std::string bin = binary_path().string();
  const fs::path log = fs::temp_directory_path() / "fene_cli_log.txt";
  const std::string cmd = bin + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  CliRun res;
  if (WIFEXITED(status)) res.exit_code = WEXITSTATUS(status);
  std::ifstream in(log);
  res.output.assign(std::istreambuf_iterator<char>(in),
                    std::istreambuf_iterator<char>());
  fs::remove(log);
  return res;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const std::string kTinyGrid = "--n 16 --n_r 8 --n_theta 8 ";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("--no-such-flag run").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
}

TEST_CASE("generated data files round-trip through the report") {
  const fs::path dir = fresh_dir("fene_cli_gen");
  const CliRun res = run_cli(kTinyGrid + "--seed 5 --out " + dir.string() +
                             " gen-data --K 0.5");
  REQUIRE(res.exit_code == 0);

  std::ifstream in(dir / "gen_report.json");
  REQUIRE(in.good());
  const auto rep = nlohmann::json::parse(in);
  const double u_norm = rep.at("u_norm").get<double>();
  CHECK(u_norm == doctest::Approx(0.375).epsilon(1e-6));
  CHECK(rep.at("config").at("seed").get<std::uint64_t>() == 5);

  const auto [u0, t] = SpectralField::load((dir / "u0.field").string());
  CHECK(t == 0.0);
  CHECK(u0.n() == 16);
  CHECK(besov_norm(u0, BesovParams(2.5, 2.0, 2.0)) ==
        doctest::Approx(u_norm).epsilon(1e-12));
  CHECK(fs::exists(dir / "psi0.dist"));
  fs::remove_all(dir);
}

TEST_CASE("malformed config files are refused with a located message") {
  const fs::path dir = fresh_dir("fene_cli_cfg");
  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << "{\n  \"n\": 16,\n  oops\n}\n";
  CliRun res = run_cli("--config " + bad.string() + " gen-data");
  CHECK(res.exit_code == 2);
  CHECK(res.output.find(bad.string() + ":") != std::string::npos);

  const fs::path unknown = dir / "unknown.json";
  std::ofstream(unknown) << "{\n  \"n\": 16,\n  \"nn\": 3\n}\n";
  res = run_cli("--config " + unknown.string() + " gen-data");
  CHECK(res.exit_code == 2);
  CHECK(res.output.find("\"nn\"") != std::string::npos);
  CHECK(res.output.find(":3:") != std::string::npos);

  res = run_cli("--config " + (dir / "missing.json").string() + " gen-data");
  CHECK(res.exit_code == 2);
  fs::remove_all(dir);
}

TEST_CASE("flags override the config file") {
  const fs::path dir = fresh_dir("fene_cli_override");
  const fs::path cfg = dir / "cfg.json";
  std::ofstream(cfg) << "{\"n\": 16, \"n_r\": 8, \"n_theta\": 8, \"seed\": 9}";
  const CliRun res = run_cli("--config " + cfg.string() + " --seed 5 --out " +
                             dir.string() + " gen-data --K 0.5");
  REQUIRE(res.exit_code == 0);
  std::ifstream in(dir / "gen_report.json");
  const auto rep = nlohmann::json::parse(in);
  CHECK(rep.at("config").at("seed").get<std::uint64_t>() == 5);
  CHECK(rep.at("config").at("n").get<int>() == 16);
  fs::remove_all(dir);
}

TEST_CASE("a short coupled run writes its report and checkpoint") {
  const fs::path dir = fresh_dir("fene_cli_run");
  const CliRun res = run_cli(kTinyGrid + "--dt 2e-3 --t_end 0.04 --out " +
                             dir.string() + " run --K 0.5");
  REQUIRE(res.exit_code == 0);
  std::ifstream in(dir / "run_report.json");
  REQUIRE(in.good());
  const auto rep = nlohmann::json::parse(in);
  CHECK_FALSE(rep.at("aborted").get<bool>());
  CHECK(rep.at("times").size() == rep.at("mass").size());
  CHECK(rep.at("times").back().get<double>() == doctest::Approx(0.04));
  CHECK(fs::exists(dir / "final_checkpoint.json"));
  fs::remove_all(dir);
}

TEST_CASE("the closed-form solution check passes on a tiny grid") {
  const fs::path dir = fresh_dir("fene_cli_tg");
  const CliRun res = run_cli(kTinyGrid + "--dt 1e-3 --t_end 0.02 --out " +
                             dir.string() + " taylor-green --amplitude 0.3");
  CHECK(res.exit_code == 0);
  std::ifstream in(dir / "taylor_green.json");
  REQUIRE(in.good());
  const auto rep = nlohmann::json::parse(in);
  CHECK(rep.at("max_l2_err").get<double>() < 1e-5);
  fs::remove_all(dir);
}

}  // TEST_SUITE
