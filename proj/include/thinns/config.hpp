/// @file config.hpp
/// @brief Experiment configuration: JSON parsing with strict key checking,
///        validation that reports every violation, and a stable hash used to
///        name output artifacts.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "thinns/errors.hpp"
#include "thinns/experiments.hpp"

namespace thinns {

struct ExperimentConfig {
  // pressure
  double a = 1.0, gamma = 2.0;
  // viscosity
  double mu = 0.1, eta = 0.0;
  // geometry
  double epsilon = 0.5;
  std::vector<double> epsilon_list;
  int nx = 16, ny = 16, nz = 64;
  // time
  double t_end = 0.25, cfl = 0.4;
  int sample_every = 10;
  int n_samples = 8;
  // reference data
  double rho_bar = 1.0, b = 0.1, s = 0.1;
  int nz_ref = 512;
  // perturbation
  double delta = 1e-3;
  double delta_lo = 0.0, delta_hi = 0.0;
  int iters = 8;
  std::uint64_t seed = 1;
  double amplitude = 0.01;
  // constants
  double c_gronwall = 1.0, c_geom = 1.0;
  bool calibrate = false;
  // numerics
  double kappa4 = 0.01;
  double lame_tol = 1e-8;
  // output
  std::string out_dir;
  bool dump_fields = false;
  bool report_estimates = false;

  RunSetup setup() const {
    RunSetup st;
    st.law = PressureLaw{a, gamma};
    st.visc = Viscosity(mu, eta);
    st.epsilon = epsilon;
    st.nx = nx;
    st.ny = ny;
    st.nz = nz;
    st.t_end = t_end;
    st.cfl = cfl;
    st.sample_every = sample_every;
    st.kappa4 = kappa4;
    st.rho_bar = rho_bar;
    st.b = b;
    st.s = s;
    st.nz_ref = nz_ref;
    return st;
  }
};

namespace detail_cfg {

using json = nlohmann::json;

inline void expect_keys(const json& obj, const char* section,
                        const std::vector<std::string>& allowed,
                        std::vector<std::string>& errors) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const std::string& k : allowed)
      if (it.key() == k) known = true;
    if (!known) errors.push_back(std::string("unknown key '") + section + "." + it.key() + "'");
  }
}

template <class T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace detail_cfg

/// Parse and validate a JSON configuration document. Unknown keys are
/// rejected; the thrown message lists every violated constraint.
inline ExperimentConfig parse_config(const std::string& text) {
  using detail_cfg::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config parse error: document must be an object");

  ExperimentConfig cfg;
  std::vector<std::string> errors;
  detail_cfg::expect_keys(doc, "",
                          {"pressure", "viscosity", "geometry", "time", "reference",
                           "perturbation", "constants", "numerics", "output"},
                          errors);
  try {
    if (doc.contains("pressure")) {
      const json& s = doc["pressure"];
      detail_cfg::expect_keys(s, "pressure", {"a", "gamma"}, errors);
      detail_cfg::read(s, "a", cfg.a);
      detail_cfg::read(s, "gamma", cfg.gamma);
    }
    if (doc.contains("viscosity")) {
      const json& s = doc["viscosity"];
      detail_cfg::expect_keys(s, "viscosity", {"mu", "eta"}, errors);
      detail_cfg::read(s, "mu", cfg.mu);
      detail_cfg::read(s, "eta", cfg.eta);
    }
    if (doc.contains("geometry")) {
      const json& s = doc["geometry"];
      detail_cfg::expect_keys(s, "geometry", {"epsilon", "epsilon_list", "nx", "ny", "nz"},
                              errors);
      detail_cfg::read(s, "epsilon", cfg.epsilon);
      detail_cfg::read(s, "epsilon_list", cfg.epsilon_list);
      detail_cfg::read(s, "nx", cfg.nx);
      detail_cfg::read(s, "ny", cfg.ny);
      detail_cfg::read(s, "nz", cfg.nz);
    }
    if (doc.contains("time")) {
      const json& s = doc["time"];
      detail_cfg::expect_keys(s, "time", {"t_end", "cfl", "sample_every", "n_samples"}, errors);
      detail_cfg::read(s, "t_end", cfg.t_end);
      detail_cfg::read(s, "cfl", cfg.cfl);
      detail_cfg::read(s, "sample_every", cfg.sample_every);
      detail_cfg::read(s, "n_samples", cfg.n_samples);
    }
    if (doc.contains("reference")) {
      const json& s = doc["reference"];
      detail_cfg::expect_keys(s, "reference", {"rho_bar", "b", "s", "nz_ref"}, errors);
      detail_cfg::read(s, "rho_bar", cfg.rho_bar);
      detail_cfg::read(s, "b", cfg.b);
      detail_cfg::read(s, "s", cfg.s);
      detail_cfg::read(s, "nz_ref", cfg.nz_ref);
    }
    if (doc.contains("perturbation")) {
      const json& s = doc["perturbation"];
      detail_cfg::expect_keys(
          s, "perturbation", {"delta", "delta_lo", "delta_hi", "iters", "seed", "amplitude"},
          errors);
      detail_cfg::read(s, "delta", cfg.delta);
      detail_cfg::read(s, "delta_lo", cfg.delta_lo);
      detail_cfg::read(s, "delta_hi", cfg.delta_hi);
      detail_cfg::read(s, "iters", cfg.iters);
      detail_cfg::read(s, "seed", cfg.seed);
      detail_cfg::read(s, "amplitude", cfg.amplitude);
    }
    if (doc.contains("constants")) {
      const json& s = doc["constants"];
      detail_cfg::expect_keys(s, "constants", {"c_gronwall", "c_geom", "calibrate"}, errors);
      detail_cfg::read(s, "c_gronwall", cfg.c_gronwall);
      detail_cfg::read(s, "c_geom", cfg.c_geom);
      detail_cfg::read(s, "calibrate", cfg.calibrate);
    }
    if (doc.contains("numerics")) {
      const json& s = doc["numerics"];
      detail_cfg::expect_keys(s, "numerics", {"kappa4", "lame_tol"}, errors);
      detail_cfg::read(s, "kappa4", cfg.kappa4);
      detail_cfg::read(s, "lame_tol", cfg.lame_tol);
    }
    if (doc.contains("output")) {
      const json& s = doc["output"];
      detail_cfg::expect_keys(s, "output", {"dir", "dump_fields", "report_estimates"}, errors);
      detail_cfg::read(s, "dir", cfg.out_dir);
      detail_cfg::read(s, "dump_fields", cfg.dump_fields);
      detail_cfg::read(s, "report_estimates", cfg.report_estimates);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }

  // validation: collect every violation
  if (!(cfg.a > 0.0)) errors.push_back("pressure.a must be positive");
  if (!(cfg.gamma > 1.0)) errors.push_back("pressure.gamma must exceed 1");
  if (!(cfg.mu > 0.0)) errors.push_back("viscosity.mu must be positive");
  if (cfg.eta < 0.0) errors.push_back("viscosity.eta must be nonnegative");
  if (!(cfg.epsilon > 0.0) || cfg.epsilon > 1.0)
    errors.push_back("geometry.epsilon must lie in (0, 1]");
  for (std::size_t m = 0; m < cfg.epsilon_list.size(); ++m) {
    const double e = cfg.epsilon_list[m];
    if (!(e > 0.0) || e > 1.0) {
      errors.push_back("geometry.epsilon_list entries must lie in (0, 1]");
      break;
    }
  }
  for (std::size_t m = 1; m < cfg.epsilon_list.size(); ++m)
    if (!(cfg.epsilon_list[m] < cfg.epsilon_list[m - 1])) {
      errors.push_back("geometry.epsilon_list must be strictly decreasing");
      break;
    }
  if (cfg.nx < 2 || cfg.ny < 2 || cfg.nz < 2)
    errors.push_back("geometry resolutions must be >= 2");
  if (!(cfg.t_end >= 0.0)) errors.push_back("time.t_end must be nonnegative");
  if (!(cfg.cfl > 0.0) || cfg.cfl > 1.0) errors.push_back("time.cfl must lie in (0, 1]");
  if (cfg.sample_every < 1) errors.push_back("time.sample_every must be >= 1");
  if (cfg.n_samples < 1) errors.push_back("time.n_samples must be >= 1");
  if (!(cfg.rho_bar > 0.0)) errors.push_back("reference.rho_bar must be positive");
  if (cfg.nz_ref < 2) errors.push_back("reference.nz_ref must be >= 2");
  if (cfg.delta < 0.0) errors.push_back("perturbation.delta must be nonnegative");
  if (cfg.iters < 1) errors.push_back("perturbation.iters must be >= 1");
  if (cfg.amplitude < 0.0) errors.push_back("perturbation.amplitude must be nonnegative");
  if (cfg.kappa4 < 0.0) errors.push_back("numerics.kappa4 must be nonnegative");
  if (!(cfg.lame_tol > 0.0)) errors.push_back("numerics.lame_tol must be positive");

  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const std::string& e : errors) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
  return cfg;
}

/// Canonical serialization of a config (sorted keys, full precision).
inline std::string canonical_config(const ExperimentConfig& c) {
  detail_cfg::json j;
  j["pressure"] = {{"a", c.a}, {"gamma", c.gamma}};
  j["viscosity"] = {{"mu", c.mu}, {"eta", c.eta}};
  j["geometry"] = {{"epsilon", c.epsilon},
                   {"epsilon_list", c.epsilon_list},
                   {"nx", c.nx},
                   {"ny", c.ny},
                   {"nz", c.nz}};
  j["time"] = {{"t_end", c.t_end},
               {"cfl", c.cfl},
               {"sample_every", c.sample_every},
               {"n_samples", c.n_samples}};
  j["reference"] = {{"rho_bar", c.rho_bar}, {"b", c.b}, {"s", c.s}, {"nz_ref", c.nz_ref}};
  j["perturbation"] = {{"delta", c.delta},     {"delta_lo", c.delta_lo},
                       {"delta_hi", c.delta_hi}, {"iters", c.iters},
                       {"seed", c.seed},       {"amplitude", c.amplitude}};
  j["constants"] = {{"c_gronwall", c.c_gronwall}, {"c_geom", c.c_geom}, {"calibrate", c.calibrate}};
  j["numerics"] = {{"kappa4", c.kappa4}, {"lame_tol", c.lame_tol}};
  return j.dump();
}

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

/// Short hex hash naming the run's artifacts; excludes the output section so
/// relocating outputs does not change artifact names.
inline std::string config_hash(const ExperimentConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_config(c))));
  return std::string(buf);
}

}  // namespace thinns
