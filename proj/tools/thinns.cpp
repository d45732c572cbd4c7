/// @file thinns.cpp
/// @brief Command-line front end: experiment orchestration and artifact
///        emission. Every run writes CSV/JSON files named from the config
///        hash; exit codes are 0 (pass), 1 (verdict failure),
///        2 (configuration error), 3 (numerical failure).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "thinns/config.hpp"
#include "thinns/energetics.hpp"
#include "thinns/experiments.hpp"
#include "thinns/inequalities.hpp"
#include "thinns/io.hpp"
#include "thinns/solver1d.hpp"
#include "thinns/solver3d.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace thinns;

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;
  bool quiet = false;
};

ExperimentConfig load_config(const CliOptions& opt) {
  std::ifstream in(opt.config_path);
  if (!in) throw ConfigError("cannot read config file " + opt.config_path);
  std::stringstream ss;
  ss << in.rdbuf();
  ExperimentConfig cfg = parse_config(ss.str());
  if (opt.seed_set) cfg.seed = opt.seed;
  if (!opt.out_dir.empty()) {
    cfg.out_dir = opt.out_dir;
  } else if (cfg.out_dir.empty()) {
    const char* env = std::getenv("THINNS_OUT");
    cfg.out_dir = (env != nullptr && *env != '\0') ? env : "out";
  }
  return cfg;
}

fs::path artifact(const ExperimentConfig& cfg, const std::string& stem, const std::string& ext) {
  return fs::path(cfg.out_dir) / (stem + "_" + config_hash(cfg) + ext);
}

void say(const CliOptions& opt, const std::string& msg) {
  if (!opt.quiet) std::cout << msg << "\n";
}

void write_manifest(const ExperimentConfig& cfg, const std::string& stem, json body) {
  body["config_hash"] = config_hash(cfg);
  write_text_atomic(artifact(cfg, stem, ".json"), body.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// simulate1d: axial reference solve, trajectory CSV (t, y, rho, u)
// ---------------------------------------------------------------------------
int cmd_simulate1d(const CliOptions& opt) {
  const ExperimentConfig cfg = load_config(opt);
  const ArrayXd rho0 = canonical_rho0(cfg.rho_bar, cfg.b, cfg.nz_ref);
  const ArrayXd u0 = canonical_u0(cfg.s, cfg.nz_ref);
  const auto traj = solve1d(rho0, u0, cfg.t_end, PressureLaw{cfg.a, cfg.gamma},
                            Viscosity(cfg.mu, cfg.eta), cfg.nz_ref, cfg.cfl, cfg.n_samples,
                            cfg.kappa4);
  CsvTable csv(config_hash(cfg), {"t", "y", "rho", "u"});
  for (const Profile1DD& p : traj)
    for (int k = 0; k < p.nz(); ++k)
      csv.row({p.t, (k + 0.5) / p.nz(), p.rho[k], p.u[k]});
  csv.write(artifact(cfg, "simulate1d", ".csv"));
  write_manifest(cfg, "simulate1d",
                 json{{"samples", traj.size()},
                      {"mass_initial", mass1d(traj.front())},
                      {"mass_final", mass1d(traj.back())}});
  say(opt, "simulate1d: " + std::to_string(traj.size()) + " snapshots -> " +
               artifact(cfg, "simulate1d", ".csv").string());
  return 0;
}

// ---------------------------------------------------------------------------
// simulate3d: channel solve from lifted data + bumps; summary CSV and an
// optional flat binary field dump (layout documented in the README)
// ---------------------------------------------------------------------------
int cmd_simulate3d(const CliOptions& opt) {
  const ExperimentConfig cfg = load_config(opt);
  const RunSetup setup = cfg.setup();
  const ThinDomain dom = setup.domain();
  const PressureLaw law = setup.law;
  const Viscosity visc = setup.visc;

  FluidState3D state = lift1d(
      Profile1DD{canonical_rho0(cfg.rho_bar, cfg.b, dom.nz), canonical_u0(cfg.s, dom.nz), 0.0},
      dom);
  if (cfg.delta > 0.0) {
    const Perturbation bump =
        make_perturbation(cfg.delta, cfg.seed, dom, state.rho.data.minCoeff());
    state.rho.data += bump.drho.data;
    state.u.data += bump.du.data;
  }

  CsvTable csv(config_hash(cfg), {"t", "mass", "energy", "min_rho", "max_u"});
  std::ofstream dump;
  if (cfg.dump_fields) {
    fs::create_directories(fs::path(cfg.out_dir));
    dump.open(artifact(cfg, "fields3d", ".bin"), std::ios::binary | std::ios::trunc);
    const char magic[8] = {'T', 'H', 'I', 'N', 'N', 'S', '3', 'D'};
    dump.write(magic, 8);
    const std::int64_t dims[3] = {dom.nx, dom.ny, dom.nz};
    dump.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  }
  auto sample = [&](const FluidState3D& s) {
    csv.row({s.t, total_mass(s, dom), total_energy(s, law, dom), s.rho.data.minCoeff(),
             magnitude(s.u).maxCoeff()});
    if (cfg.dump_fields) {
      dump.write(reinterpret_cast<const char*>(&s.t), sizeof(double));
      dump.write(reinterpret_cast<const char*>(s.rho.data.data()),
                 static_cast<std::streamsize>(sizeof(double) * s.rho.data.size()));
      dump.write(reinterpret_cast<const char*>(s.u.data.data()),
                 static_cast<std::streamsize>(sizeof(double) * s.u.data.size()));
    }
  };

  sample(state);
  int steps_since = 0;
  while (state.t < cfg.t_end) {
    const double dt0 = stable_dt(state, law, visc, dom, cfg.cfl);
    const double dt = std::min(dt0, cfg.t_end - state.t);
    state = step3d(state, dt, law, visc, dom, cfg.kappa4);
    if (++steps_since == cfg.sample_every || state.t >= cfg.t_end) {
      sample(state);
      steps_since = 0;
    }
  }
  csv.write(artifact(cfg, "simulate3d", ".csv"));
  write_manifest(cfg, "simulate3d",
                 json{{"t_end", state.t},
                      {"mass_final", total_mass(state, dom)},
                      {"dump_fields", cfg.dump_fields}});
  say(opt, "simulate3d: reached t = " + format17(state.t));
  return 0;
}

// ---------------------------------------------------------------------------
// energetics: functional trajectory of a (reference, perturbed) pair
// ---------------------------------------------------------------------------
int cmd_energetics(const CliOptions& opt) {
  const ExperimentConfig cfg = load_config(opt);
  const RunSetup setup = cfg.setup();
  const ThinDomain dom = setup.domain();

  FluidState3D ref0 = lift1d(
      Profile1DD{canonical_rho0(cfg.rho_bar, cfg.b, dom.nz), canonical_u0(cfg.s, dom.nz), 0.0},
      dom);
  const Perturbation bump =
      make_perturbation(cfg.delta, cfg.seed, dom, ref0.rho.data.minCoeff());
  FluidState3D pert0 = ref0;
  pert0.rho.data += bump.drho.data;
  pert0.u.data += bump.du.data;

  const PairEnergetics pe = run_pair_energetics(dom, setup.law, setup.visc, ref0, pert0,
                                                cfg.t_end, cfg.n_samples, cfg.cfl, cfg.kappa4);
  CsvTable csv(config_hash(cfg),
               {"t", "E", "D", "Estar", "I1", "I2", "I3", "I4", "I5", "I6", "I7", "sigma_linf",
                "w_linf", "residual"});
  for (std::size_t m = 0; m < pe.reports.size(); ++m) {
    const EnergyReport& r = pe.reports[m];
    double residual = 0.0;
    if (m >= 2 && m % 2 == 0) residual = pe.residuals.r[m / 2 - 1];
    csv.row({r.t, r.e, r.d_diss, r.estar, r.i[0], r.i[1], r.i[2], r.i[3], r.i[4], r.i[5],
             r.i[6], r.sigma_linf, r.w_linf, residual});
  }
  csv.write(artifact(cfg, "energetics", ".csv"));

  if (cfg.report_estimates) {
    // monitored a-priori chain on the initial snapshot
    CsvTable est(config_hash(cfg), {"row", "lhs", "rhs"});
    PairSnapshot snap;
    snap.ref = ref0;
    snap.pert = pert0;
    snap.ref_rhs = rhs3d(ref0, setup.law, setup.visc, dom, cfg.kappa4);
    snap.pert_rhs = rhs3d(pert0, setup.law, setup.visc, dom, cfg.kappa4);
    for (const EstimatePair& e : estimate_diagnostics(snap, setup.law, setup.visc, dom))
      est.row_raw({e.name, format17(e.lhs), format17(e.rhs)});
    est.write(artifact(cfg, "estimates", ".csv"));
  }

  write_manifest(cfg, "energetics",
                 json{{"max_residual", pe.residuals.max_abs},
                      {"c1", pe.c1},
                      {"mm1_norm", bump.w14 + bump.w22},
                      {"d2u_reference", "one-sided/central differences of rhs samples"}});
  say(opt, "energetics: max |residual| = " + format17(pe.residuals.max_abs));
  return 0;
}

// ---------------------------------------------------------------------------
// inequalities: measured-ratio sweep
// ---------------------------------------------------------------------------
int cmd_inequalities(const CliOptions& opt) {
  const ExperimentConfig cfg = load_config(opt);
  SweepConfig sc;
  if (!cfg.epsilon_list.empty()) sc.eps_list = cfg.epsilon_list;
  sc.n_fields = cfg.n_samples > 1 ? cfg.n_samples : 100;
  sc.seed = cfg.seed;
  sc.nx = cfg.nx;
  sc.ny = cfg.ny;
  sc.nz = cfg.nz;
  sc.lame_tol = cfg.lame_tol;
  const SweepResult res = inequality_sweep(sc);

  CsvTable csv(config_hash(cfg), {"inequality", "epsilon", "seed", "lhs", "rhs", "ratio"});
  for (const SweepRow& r : res.rows)
    csv.row_raw({r.inequality, format17(r.epsilon), std::to_string(r.seed), format17(r.lhs),
                 format17(r.rhs), r.degenerate ? "degenerate" : format17(r.ratio)});
  csv.write(artifact(cfg, "inequalities", ".csv"));

  json summary;
  for (const auto& [name, per_eps] : res.max_ratio) {
    json obj;
    for (const auto& [eps, ratio] : per_eps) obj[format17(eps)] = ratio;
    summary["max_ratio"][name] = obj;
  }
  for (const auto& [name, expo] : res.fitted_exponent) summary["fitted_exponent"][name] = expo;
  write_manifest(cfg, "inequalities", summary);
  say(opt, "inequalities: " + std::to_string(res.rows.size()) + " samples");
  return 0;
}

// ---------------------------------------------------------------------------
// robustness / critical / thinlimit / omega
// ---------------------------------------------------------------------------
json verdict_json(const RobustnessVerdict& v) {
  json j{{"epsilon", v.epsilon},
         {"delta", v.delta},
         {"omega", v.omega},
         {"estar0", v.estar0},
         {"c_used", v.c_used},
         {"c1", v.c1},
         {"u_ref", v.u_ref},
         {"mm1_norm", v.mm1_norm},
         {"envelope_ok", v.envelope_ok},
         {"smallness_ok", v.smallness_ok},
         {"ceiling_ok", v.ceiling_ok},
         {"blew_up", v.blew_up},
         {"pass", v.pass()}};
  if (v.first_violation_t) j["first_violation_t"] = *v.first_violation_t;
  return j;
}

int cmd_robustness(const CliOptions& opt) {
  const ExperimentConfig cfg = load_config(opt);
  RunSetup setup = cfg.setup();
  double c_used = cfg.c_gronwall;
  json cal_info;
  if (cfg.calibrate) {
    const Calibration cal = calibrate_c(setup, 1e-4, cfg.seed);
    c_used = cal.c_used;
    cal_info = json{{"c_fit", cal.c_fit}, {"c_used", cal.c_used}};
  }
  const RobustnessVerdict v = robustness_run(setup, cfg.delta, cfg.seed, c_used, cfg.c_geom);

  CsvTable csv(config_hash(cfg),
               {"t", "estar", "envelope", "ceiling", "sigma_linf", "w_linf"});
  for (const EstarSample& es : v.estar_series)
    csv.row({es.t, es.estar, es.envelope, es.ceiling, es.sigma_linf, es.w_linf});
  csv.write(artifact(cfg, "robustness", ".csv"));

  json manifest = verdict_json(v);
  if (!cal_info.is_null()) manifest["calibration"] = cal_info;
  write_manifest(cfg, "robustness", manifest);
  say(opt, std::string("robustness: ") + (v.pass() ? "pass" : "FAIL") +
               " (delta = " + format17(cfg.delta) + ", omega = " + format17(v.omega) + ")");
  return v.pass() ? 0 : 1;
}

int cmd_critical(const CliOptions& opt) {
  const ExperimentConfig cfg = load_config(opt);
  const RunSetup setup = cfg.setup();
  if (!(cfg.delta_hi > cfg.delta_lo))
    throw ConfigError("critical: perturbation.delta_lo/delta_hi bracket required");

  CsvTable csv(config_hash(cfg), {"iter", "delta", "pass"});
  int iter = 0;
  auto passes = [&](double delta) {
    bool ok;
    try {
      ok = robustness_run(setup, delta, cfg.seed, cfg.c_gronwall, cfg.c_geom).pass();
    } catch (const ConfigError&) {
      ok = false;  // e.g. delta too large for density positivity
    }
    csv.row({static_cast<double>(iter++), delta, ok ? 1.0 : 0.0});
    return ok;
  };
  const double dstar = critical_amplitude(passes, cfg.delta_lo, cfg.delta_hi, cfg.iters);
  csv.write(artifact(cfg, "critical", ".csv"));

  const ThinDomain dom = setup.domain();
  const double omega = omega_threshold(dom.epsilon, dom.v, cfg.t_end, cfg.c_gronwall);
  write_manifest(cfg, "critical",
                 json{{"delta_star", dstar},
                      {"omega", omega},
                      {"sufficiency_ok", dstar >= omega},
                      {"iters", cfg.iters}});
  say(opt, "critical: delta* = " + format17(dstar) + ", omega = " + format17(omega));
  return 0;
}

int cmd_thinlimit(const CliOptions& opt) {
  const ExperimentConfig cfg = load_config(opt);
  if (cfg.epsilon_list.size() < 2)
    throw ConfigError("thinlimit: geometry.epsilon_list with at least two widths required");
  const RunSetup setup = cfg.setup();
  const auto rows = thinlimit_run(setup, cfg.epsilon_list, cfg.amplitude, cfg.seed,
                                  cfg.n_samples);
  CsvTable csv(config_hash(cfg), {"epsilon", "sup_rho_err", "sup_mom_err"});
  bool decreasing = true;
  for (std::size_t m = 0; m < rows.size(); ++m) {
    csv.row({rows[m].epsilon, rows[m].sup_rho_err, rows[m].sup_mom_err});
    if (m > 0 && !(rows[m].sup_rho_err < rows[m - 1].sup_rho_err)) decreasing = false;
  }
  csv.write(artifact(cfg, "thinlimit", ".csv"));
  write_manifest(cfg, "thinlimit", json{{"rows", rows.size()}, {"rho_err_decreasing", decreasing}});
  say(opt, std::string("thinlimit: density error ") +
               (decreasing ? "decreasing" : "NOT monotone") + " across widths");
  return 0;
}

int cmd_omega(const CliOptions& opt) {
  const ExperimentConfig cfg = load_config(opt);
  const ThinDomain dom = cfg.setup().domain();
  const double omega = omega_threshold(dom.epsilon, dom.v, cfg.t_end, cfg.c_gronwall);
  std::cout << format17(omega) << "\n";
  write_manifest(cfg, "omega",
                 json{{"epsilon", dom.epsilon},
                      {"v", dom.v},
                      {"t_horizon", cfg.t_end},
                      {"c", cfg.c_gronwall},
                      {"omega", omega}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thin-channel compressible flow laboratory"};
  app.require_subcommand(1);
  app.fallthrough();

  CliOptions opt;
  app.add_option("--config", opt.config_path, "configuration file (JSON)")->required();
  app.add_option("--out", opt.out_dir, "output directory (overrides config and THINNS_OUT)");
  app.add_option("--seed", opt.seed, "perturbation seed override")
      ->each([&](const std::string&) { opt.seed_set = true; });
  app.add_option("--threads", opt.threads, "max concurrent runs in sweeps");
  app.add_flag("--quiet", opt.quiet, "suppress progress output");

  std::map<std::string, std::function<int(const CliOptions&)>> commands{
      {"simulate3d", cmd_simulate3d}, {"simulate1d", cmd_simulate1d},
      {"energetics", cmd_energetics}, {"inequalities", cmd_inequalities},
      {"robustness", cmd_robustness}, {"critical", cmd_critical},
      {"thinlimit", cmd_thinlimit},   {"omega", cmd_omega}};
  for (auto& [name, fn] : commands) app.add_subcommand(name, "");

  CLI11_PARSE(app, argc, argv);

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    return commands.at(sub)(opt);
  } catch (const BlowupError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  }
}
