#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fene/coupled.hpp"
#include "fene/errors.hpp"
#include "fene/experiments.hpp"
#include "fene/io.hpp"

namespace {

using nlohmann::json;

/// Flat configuration shared by every subcommand; flags mirror the keys
/// and override the config file.
struct CliConfig {
  int n = 64;
  int n_r = 32;
  int n_theta = 16;
  double dt = 1e-3;
  double t_end = 0.5;
  double k = 2.0;
  double epsilon = 0.5;
  double re = 0.5;
  std::string drag = "corot";
  double s = 2.5;
  double p = 2.0;
  double r = 2.0;
  std::uint64_t seed = 1;
  std::vector<double> nu_list = {0x1p-4, 0x1p-5, 0x1p-6, 0x1p-7,
                                 0x1p-8, 0x1p-9, 0x1p-10};
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int line_of_offset(const std::string& raw, std::size_t byte) {
  return 1 + static_cast<int>(std::count(
                 raw.begin(), raw.begin() + std::min(byte, raw.size()), '\n'));
}

int line_of_key(const std::string& raw, const std::string& key) {
  const std::size_t pos = raw.find("\"" + key + "\"");
  return pos == std::string::npos ? 1 : line_of_offset(raw, pos);
}

json to_json(const CliConfig& c) {
  return json{{"n", c.n},         {"n_r", c.n_r},
              {"n_theta", c.n_theta}, {"dt", c.dt},
              {"t_end", c.t_end}, {"k", c.k},
              {"epsilon", c.epsilon}, {"re", c.re},
              {"drag", c.drag},   {"s", c.s},
              {"p", c.p},         {"r", c.r},
              {"seed", c.seed},   {"nu_list", c.nu_list}};
}

void load_config(const std::string& path, CliConfig& c) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ":1: cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string raw = buf.str();

  json j;
  try {
    j = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ":" + std::to_string(line_of_offset(raw, e.byte)) +
                      ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(path + ":1: config must be an object");

  auto bad = [&](const std::string& key, const std::string& why) {
    return ConfigError(path + ":" + std::to_string(line_of_key(raw, key)) +
                       ": key \"" + key + "\" " + why);
  };
  auto num = [&](const std::string& key, const json& v) {
    if (!v.is_number()) throw bad(key, "must be a number");
    return v.get<double>();
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "n")
      c.n = static_cast<int>(num(key, v));
    else if (key == "n_r")
      c.n_r = static_cast<int>(num(key, v));
    else if (key == "n_theta")
      c.n_theta = static_cast<int>(num(key, v));
    else if (key == "dt")
      c.dt = num(key, v);
    else if (key == "t_end")
      c.t_end = num(key, v);
    else if (key == "k")
      c.k = num(key, v);
    else if (key == "epsilon")
      c.epsilon = num(key, v);
    else if (key == "re")
      c.re = num(key, v);
    else if (key == "drag") {
      if (!v.is_string()) throw bad(key, "must be \"full\" or \"corot\"");
      c.drag = v.get<std::string>();
    } else if (key == "s")
      c.s = num(key, v);
    else if (key == "p")
      c.p = num(key, v);
    else if (key == "r")
      c.r = num(key, v);
    else if (key == "seed") {
      if (!v.is_number_unsigned()) throw bad(key, "must be an unsigned integer");
      c.seed = v.get<std::uint64_t>();
    } else if (key == "nu_list") {
      if (!v.is_array()) throw bad(key, "must be an array of numbers");
      c.nu_list.clear();
      for (const auto& e : v) c.nu_list.push_back(num(key, e));
    } else {
      throw bad(key, "is not a known config key");
    }
  }
}

int snapshot_stride_for(int steps) {
  const int target = std::max(1, steps / 50);
  for (int d = target; d > 1; --d)
    if (steps % d == 0) return d;
  return 1;
}

fene::SolverConfig solver_config(const CliConfig& c) {
  fene::SolverConfig sc;
  sc.n = c.n;
  sc.n_r = c.n_r;
  sc.n_theta = c.n_theta;
  sc.dt = c.dt;
  sc.t_end = c.t_end;
  sc.polymer.k = c.k;
  sc.polymer.epsilon = c.epsilon;
  sc.polymer.re = c.re;
  if (c.drag == "full")
    sc.polymer.drag = fene::DragType::kFull;
  else if (c.drag == "corot")
    sc.polymer.drag = fene::DragType::kCorotational;
  else
    throw ConfigError("drag must be \"full\" or \"corot\", got \"" + c.drag +
                      "\"");
  sc.besov = {c.s, c.p, c.r};
  sc.snapshot_stride = snapshot_stride_for(sc.steps());
  return sc;
}

void write_report(const std::string& out, const std::string& name, json j,
                  const CliConfig& c) {
  j["config"] = to_json(c);
  fene::io::write_text_file(fene::io::join_path(out, name), j.dump(2) + "\n");
}

fene::State perturbed(const fene::GeneratedData& data, double delta) {
  fene::State b{data.u0, data.psi0, 0.0};
  b.u.scale(1.0 + delta);
  for (double& v : b.psi.values()) v = 1.0 + (1.0 + delta) * (v - 1.0);
  return b;
}

int cmd_run(const CliConfig& c, const std::string& out, double K) {
  const fene::SolverConfig sc = solver_config(c);
  const fene::GeneratedData data = fene::gen_besov_data(sc, K, c.seed);
  const fene::CoupledSolver solver(sc);
  fene::RunRecord rec;
  int code = 0;
  try {
    rec = solver.run({data.u0, data.psi0, 0.0});
  } catch (const fene::AbortedRun& e) {
    std::cerr << e.what() << "\n";
    rec = e.partial();
    code = 1;
  }
  json j{{"times", rec.times},       {"u_besov", rec.u_besov},
         {"psi_besov", rec.psi_besov}, {"energy", rec.energy},
         {"mass", rec.mass},         {"entropy", rec.entropy},
         {"aborted", rec.aborted}};
  write_report(out, "run_report.json", j, c);
  if (!rec.aborted)
    fene::save_checkpoint(fene::io::join_path(out, "final_checkpoint.json"),
                          rec.final_state);
  std::cout << "run: t=" << (rec.times.empty() ? 0.0 : rec.times.back())
            << " u_besov=" << (rec.u_besov.empty() ? 0.0 : rec.u_besov.back())
            << " mass=" << (rec.mass.empty() ? 0.0 : rec.mass.back()) << "\n";
  return code;
}

int cmd_sweep(const CliConfig& c, const std::string& out, double K,
              double eps1) {
  const fene::SolverConfig sc = solver_config(c);
  const fene::GeneratedData data = fene::gen_besov_data(sc, K, c.seed);
  const fene::RateReport rep = fene::viscosity_sweep(data, sc, c.nu_list, eps1);
  fene::write_rate_report(rep, out, "rate_report");
  write_report(out, "rate_report.json", json::parse(rep.to_json()), c);
  std::cout << "sweep: regime=" << rep.regime << " u_slope=" << rep.fit_u.slope
            << " (predicted " << rep.predicted_u << ")"
            << " psi_slope=" << rep.fit_psi.slope << " (predicted "
            << rep.predicted_psi << ")"
            << " r2=" << rep.fit_u.r2 << "/" << rep.fit_psi.r2 << "\n";
  return rep.complete && rep.pass_u && rep.pass_psi ? 0 : 1;
}

int cmd_picard(const CliConfig& c, const std::string& out, double K,
               int iters) {
  const fene::SolverConfig sc = solver_config(c);
  const fene::GeneratedData data = fene::gen_besov_data(sc, K, c.seed);
  const fene::PicardResult res =
      fene::picard_run(data.u0, data.psi0, sc, iters);
  bool contracts = true;
  // a_seq[i] is the increment norm A_{i+1}.
  for (std::size_t i = 3; i + 1 < res.a_seq.size() && i <= 8; ++i)
    contracts = contracts &&
                res.a_seq[i] <= 0.9 * std::max(res.a_seq[i - 1],
                                               res.a_seq[i - 2]);
  json j{{"a_seq", res.a_seq}, {"b_seq", res.b_seq}, {"contracts", contracts}};
  write_report(out, "picard_report.json", j, c);
  std::cout << "picard: iterations=" << res.a_seq.size()
            << " final_increment=" << res.a_seq.back()
            << (contracts ? " contracting" : " NOT contracting") << "\n";
  return contracts ? 0 : 1;
}

int cmd_depend(const CliConfig& c, const std::string& out, double K,
               double delta) {
  const fene::SolverConfig sc = solver_config(c);
  const fene::GeneratedData data = fene::gen_besov_data(sc, K, c.seed);
  const fene::State a{data.u0, data.psi0, 0.0};
  const fene::State b = perturbed(data, delta);
  json rows = json::array();
  for (double nu : c.nu_list) {
    const fene::DependenceReport rep = fene::continuous_dependence(a, b, sc, nu);
    const double ratio = (rep.output_u + rep.output_psi) /
                         (rep.input_u + rep.input_psi);
    rows.push_back({{"nu", nu},
                    {"input_u", rep.input_u},
                    {"input_psi", rep.input_psi},
                    {"output_u", rep.output_u},
                    {"output_psi", rep.output_psi},
                    {"ratio", ratio}});
    std::cout << "depend: nu=" << nu << " ratio=" << ratio << "\n";
  }
  write_report(out, "depend_report.json", json{{"points", rows}}, c);
  return 0;
}

int cmd_smooth(const CliConfig& c, const std::string& out, double K, double nu,
               const std::vector<int>& blocks) {
  const fene::SolverConfig sc = solver_config(c);
  const fene::GeneratedData data = fene::gen_besov_data(sc, K, c.seed);
  const auto rows = fene::smoothing_comparison(data, sc, blocks, nu);
  json jr = json::array();
  for (const auto& row : rows) {
    jr.push_back({{"block", row.block},
                  {"data_u", row.data_u},
                  {"data_psi", row.data_psi},
                  {"sol_u", row.sol_u},
                  {"sol_psi", row.sol_psi}});
    std::cout << "smooth: block=" << row.block << " data_u=" << row.data_u
              << " sol_u=" << row.sol_u << "\n";
  }
  write_report(out, "smooth_report.json", json{{"rows", jr}}, c);
  return 0;
}

int cmd_check_lemmas(const CliConfig& c, const std::string& out, int samples) {
  const fene::SolverConfig sc = solver_config(c);
  const auto reports = fene::check_lemmas(sc, c.seed, samples);
  write_report(out, "lemma_report.json",
               json::parse(fene::lemma_report_json(reports)), c);
  bool all_finite = true;
  for (const auto& rep : reports) {
    all_finite = all_finite && rep.finite;
    std::cout << "lemma " << rep.name << ": max_ratio=" << rep.max_ratio
              << " refined=" << rep.refined_ratio
              << (rep.finite ? "" : " NOT FINITE") << "\n";
  }
  return all_finite ? 0 : 1;
}

int cmd_taylor_green(CliConfig c, const std::string& out, double amplitude,
                     double nu, bool nu_set) {
  fene::SolverConfig sc = solver_config(c);
  if (nu_set) sc.polymer = sc.polymer.at_nu(nu);
  const fene::TaylorGreenResult res = fene::taylor_green_check(sc, amplitude);
  json j{{"max_l2_err", res.max_l2_err},
         {"times", res.times},
         {"errors", res.errors}};
  write_report(out, "taylor_green.json", j, c);
  std::cout << "taylor-green: max L2 error = " << res.max_l2_err << "\n";
  return res.max_l2_err < 1e-5 ? 0 : 1;
}

int cmd_gen_data(const CliConfig& c, const std::string& out, double K) {
  const fene::SolverConfig sc = solver_config(c);
  const fene::GeneratedData data = fene::gen_besov_data(sc, K, c.seed);
  const std::string u_path = fene::io::join_path(out, "u0.field");
  const std::string psi_path = fene::io::join_path(out, "psi0.dist");
  data.u0.save(u_path, 0.0);
  data.psi0.save(psi_path, 0.0);
  json j{{"u_norm", data.u_norm},
         {"psi_norm", data.psi_norm},
         {"K", K},
         {"u_file", u_path},
         {"psi_file", psi_path}};
  write_report(out, "gen_report.json", j, c);
  std::cout << "gen-data: u_norm=" << data.u_norm
            << " psi_norm=" << data.psi_norm << " (K=" << K << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FENE dumbbell laboratory"};
  app.require_subcommand(1);

  CliConfig c;
  std::string config_path;
  std::string out = fene::io::output_dir();

  // The config file loads before flag parsing so flags override it.
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc)
      config_path = argv[i + 1];
    else if (arg.rfind("--config=", 0) == 0)
      config_path = arg.substr(9);
  }
  try {
    if (!config_path.empty()) load_config(config_path, c);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out, "output directory (default: FENE_OUT or .)");
  app.add_option("--n", c.n, "spatial grid size");
  app.add_option("--n_r", c.n_r, "radial cells");
  app.add_option("--n_theta", c.n_theta, "angular cells");
  app.add_option("--dt", c.dt, "time step");
  app.add_option("--t_end", c.t_end, "final time");
  app.add_option("--k", c.k, "potential exponent");
  app.add_option("--epsilon", c.epsilon, "coupling strength");
  app.add_option("--re", c.re, "Reynolds number");
  app.add_option("--drag", c.drag, "drag term: full or corot");
  app.add_option("--s", c.s, "Besov regularity");
  app.add_option("--p", c.p, "Besov integrability");
  app.add_option("--r", c.r, "Besov summability");
  app.add_option("--seed", c.seed, "random seed");
  app.add_option("--nu_list", c.nu_list, "viscosity list")->delimiter(',');

  double K = 1.0, eps1 = 0.1, nu = 0.01, delta = 0.05, amplitude = 1.0;
  int iters = 10, samples = 100;
  std::vector<int> blocks = {1, 2, 3, 4};

  auto* run = app.add_subcommand("run", "single coupled integration");
  run->add_option("--K", K, "data norm bound");
  auto* sweep = app.add_subcommand("sweep", "vanishing-viscosity rate fit");
  sweep->add_option("--K", K, "data norm bound");
  sweep->add_option("--eps1", eps1, "rate offset used when s = 2");
  auto* picard = app.add_subcommand("picard", "successive linearizations");
  picard->add_option("--K", K, "data norm bound");
  picard->add_option("--iters", iters, "iterations");
  auto* depend = app.add_subcommand("depend", "continuous dependence ratios");
  depend->add_option("--K", K, "data norm bound");
  depend->add_option("--delta", delta, "relative data perturbation");
  auto* smooth = app.add_subcommand("smooth", "low-pass data comparison");
  smooth->add_option("--K", K, "data norm bound");
  smooth->add_option("--nu", nu, "viscosity");
  smooth->add_option("--blocks", blocks, "low-pass cutoffs")->delimiter(',');
  auto* lemmas = app.add_subcommand("check-lemmas", "inequality ratios");
  lemmas->add_option("--samples", samples, "randomized samples");
  auto* tg = app.add_subcommand("taylor-green", "closed-form solution check");
  auto* tg_nu = tg->add_option("--nu", nu, "viscosity override");
  tg->add_option("--amplitude", amplitude, "initial amplitude");
  auto* gen = app.add_subcommand("gen-data", "write seeded data files");
  gen->add_option("--K", K, "data norm bound");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return cmd_run(c, out, K);
    if (sweep->parsed()) return cmd_sweep(c, out, K, eps1);
    if (picard->parsed()) return cmd_picard(c, out, K, iters);
    if (depend->parsed()) return cmd_depend(c, out, K, delta);
    if (smooth->parsed()) return cmd_smooth(c, out, K, nu, blocks);
    if (lemmas->parsed()) return cmd_check_lemmas(c, out, samples);
    if (tg->parsed())
      return cmd_taylor_green(c, out, amplitude, nu, tg_nu->count() > 0);
    if (gen->parsed()) return cmd_gen_data(c, out, K);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const fene::HypothesisViolation& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}
