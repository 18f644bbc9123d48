// Copyright 2026 The pricelab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pricelab/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#ifndef PRICELAB_VERSION
#define PRICELAB_VERSION "0.0.0"
#endif
#ifndef PRICELAB_GIT_STATE
#define PRICELAB_GIT_STATE "unknown"
#endif

namespace pricelab {

using nlohmann::json;

std::string software_version() { return PRICELAB_VERSION; }

namespace {

void check_keys(const json &j, const std::set<std::string> &allowed,
                const std::string &where) {
  if (!j.is_object()) {
    throw ConfigError(where + ": expected an object");
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
  }
}

template <typename T>
T get(const json &j, const std::string &key, const std::string &where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception &e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <typename T>
void read(const json &j, const std::string &key, T &out,
          const std::string &where) {
  if (j.contains(key)) {
    out = get<T>(j, key, where);
  }
}

void read_pair(const json &j, const std::string &key, double &lo, double &hi,
               const std::string &where) {
  if (!j.contains(key)) {
    return;
  }
  const auto v = get<std::vector<double>>(j, key, where);
  if (v.size() != 2) {
    throw ConfigError(where + "." + key + ": expected [lo, hi]");
  }
  lo = v[0];
  hi = v[1];
}

ScaleSpec parse_scale(const json &j) {
  if (j.is_number_integer()) {
    try {
      return scale_preset(j.get<int>());
    } catch (const std::invalid_argument &e) {
      throw ConfigError(std::string("scale: ") + e.what());
    }
  }
  check_keys(j,
             {"preset", "label", "m", "n", "alpha_range", "B_range", "box",
              "box_rule", "box_scale", "sigma", "shift_margin", "near_zero_demand"},
             "scale");
  ScaleSpec s;
  if (j.contains("preset")) {
    try {
      s = scale_preset(get<int>(j, "preset", "scale"));
    } catch (const std::invalid_argument &e) {
      throw ConfigError(std::string("scale.preset: ") + e.what());
    }
  }
  read(j, "label", s.label, "scale");
  long m = s.m;
  long n = s.n;
  read(j, "m", m, "scale");
  read(j, "n", n, "scale");
  s.m = m;
  s.n = n;
  read_pair(j, "alpha_range", s.alpha_lo, s.alpha_hi, "scale");
  read_pair(j, "B_range", s.b_lo, s.b_hi, "scale");
  read_pair(j, "box", s.box_lower, s.box_upper, "scale");
  if (j.contains("box_rule")) {
    try {
      s.box_rule = box_rule_from_string(get<std::string>(j, "box_rule", "scale"));
    } catch (const std::invalid_argument &e) {
      throw ConfigError(std::string("scale.box_rule: ") + e.what());
    }
  }
  read(j, "box_scale", s.box_scale, "scale");
  read(j, "sigma", s.sigma, "scale");
  read(j, "shift_margin", s.shift_margin, "scale");
  read(j, "near_zero_demand", s.near_zero_demand, "scale");
  return s;
}

PolicySpec parse_policy(const json &j, std::size_t idx) {
  const std::string where = "policies[" + std::to_string(idx) + "]";
  check_keys(j,
             {"name", "kind", "zeta", "sigma0", "tau", "eps0", "eps0_power",
              "rho", "offline_n", "misspec", "noise_sd", "lambda",
              "gaussian_perturbation", "force_zero_gamma"},
             where);
  PolicySpec p;
  try {
    p.kind = policy_kind_from_string(get<std::string>(j, "kind", where));
  } catch (const std::invalid_argument &e) {
    throw ConfigError(where + ".kind: " + e.what());
  }
  read(j, "name", p.name, where);
  read(j, "zeta", p.zeta, where);
  read(j, "sigma0", p.sigma0, where);
  read(j, "tau", p.tau, where);
  read(j, "eps0", p.eps0, where);
  if (j.contains("eps0_power")) {
    p.eps0_power = get<double>(j, "eps0_power", where);
  }
  read(j, "rho", p.rho, where);
  read(j, "offline_n", p.offline_n, where);
  read(j, "misspec", p.misspec, where);
  if (j.contains("noise_sd")) {
    p.noise_sd = get<double>(j, "noise_sd", where);
  }
  read(j, "lambda", p.lambda, where);
  read(j, "gaussian_perturbation", p.gaussian_perturbation, where);
  read(j, "force_zero_gamma", p.force_zero_gamma, where);
  return p;
}

ExperimentConfig parse_config_json(const json &j) {
  check_keys(j,
             {"scale", "horizons", "reps", "policies", "sweep", "master_seed",
              "output", "workers", "curtailment", "observe_rejected"},
             "config");
  ExperimentConfig cfg;
  if (!j.contains("scale") || !j.contains("horizons") ||
      !j.contains("policies")) {
    throw ConfigError("config: scale, horizons and policies are required");
  }
  cfg.scale = parse_scale(j.at("scale"));
  cfg.horizons = get<std::vector<int>>(j, "horizons", "config");
  read(j, "reps", cfg.reps, "config");
  read(j, "master_seed", cfg.master_seed, "config");
  read(j, "output", cfg.output, "config");
  read(j, "workers", cfg.workers, "config");
  read(j, "observe_rejected", cfg.observe_rejected, "config");
  if (j.contains("curtailment")) {
    const auto c = get<std::string>(j, "curtailment", "config");
    if (c == "index_order") {
      cfg.curtailment = Curtailment::index_order;
    } else if (c == "proportional") {
      cfg.curtailment = Curtailment::proportional;
    } else {
      throw ConfigError("config.curtailment: expected index_order or "
                        "proportional");
    }
  }
  const json &pol = j.at("policies");
  if (!pol.is_array()) {
    throw ConfigError("config.policies: expected an array");
  }
  for (std::size_t i = 0; i < pol.size(); ++i) {
    cfg.policies.push_back(parse_policy(pol[i], i));
  }
  if (j.contains("sweep")) {
    const json &s = j.at("sweep");
    check_keys(s, {"param", "grid"}, "sweep");
    try {
      cfg.sweep.param = sweep_param_from_string(get<std::string>(s, "param", "sweep"));
    } catch (const std::invalid_argument &e) {
      throw ConfigError(std::string("sweep.param: ") + e.what());
    }
    read(s, "grid", cfg.sweep.grid, "sweep");
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument &e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

json config_json(const ExperimentConfig &cfg) {
  json s;
  s["label"] = cfg.scale.label;
  s["m"] = cfg.scale.m;
  s["n"] = cfg.scale.n;
  s["alpha_range"] = {cfg.scale.alpha_lo, cfg.scale.alpha_hi};
  s["B_range"] = {cfg.scale.b_lo, cfg.scale.b_hi};
  s["box"] = {cfg.scale.box_lower, cfg.scale.box_upper};
  s["box_rule"] = to_string(cfg.scale.box_rule);
  s["box_scale"] = cfg.scale.box_scale;
  s["sigma"] = cfg.scale.sigma;
  s["shift_margin"] = cfg.scale.shift_margin;
  s["near_zero_demand"] = cfg.scale.near_zero_demand;
  json pols = json::array();
  for (const PolicySpec &p : cfg.policies) {
    json q;
    q["name"] = p.name;
    q["kind"] = to_string(p.kind);
    q["zeta"] = p.zeta;
    q["sigma0"] = p.sigma0;
    q["tau"] = p.tau;
    q["eps0"] = p.eps0;
    if (p.eps0_power) {
      q["eps0_power"] = *p.eps0_power;
    }
    q["rho"] = p.rho;
    q["offline_n"] = p.offline_n;
    q["misspec"] = p.misspec;
    if (p.noise_sd) {
      q["noise_sd"] = *p.noise_sd;
    }
    q["lambda"] = p.lambda;
    q["gaussian_perturbation"] = p.gaussian_perturbation;
    q["force_zero_gamma"] = p.force_zero_gamma;
    pols.push_back(q);
  }
  json j;
  j["scale"] = s;
  j["horizons"] = cfg.horizons;
  j["reps"] = cfg.reps;
  j["policies"] = pols;
  j["sweep"] = {{"param", to_string(cfg.sweep.param)}, {"grid", cfg.sweep.grid}};
  j["master_seed"] = cfg.master_seed;
  j["output"] = cfg.output;
  j["workers"] = cfg.workers;
  j["curtailment"] = cfg.curtailment == Curtailment::index_order
                         ? "index_order"
                         : "proportional";
  j["observe_rejected"] = cfg.observe_rejected;
  return j;
}

json matrix_rows(const Matd &m) {
  std::vector<double> v;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index k = 0; k < m.cols(); ++k) {
      v.push_back(m(i, k));
    }
  }
  return v;
}

json vector_json(const Vecd &x) {
  return std::vector<double>(x.data(), x.data() + x.size());
}

} // namespace

ExperimentConfig parse_config(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (j.is_object() && j.contains("manifest")) {
    check_keys(j, {"manifest", "config"}, "manifest");
    if (!j.contains("config")) {
      throw ConfigError("manifest: missing config");
    }
    return parse_config_json(j.at("config"));
  }
  return parse_config_json(j);
}

ExperimentConfig load_config_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot read config file " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig &cfg) {
  return config_json(cfg).dump(2) + "\n";
}

std::string manifest_json(const ExperimentConfig &cfg) {
  json seeds = json::array();
  for (int r = 0; r < cfg.reps; ++r) {
    seeds.push_back(episode_seed(cfg.master_seed, r));
  }
  json m;
  m["software"] = "pricelab";
  m["version"] = software_version();
  m["git"] = PRICELAB_GIT_STATE;
  m["master_seed"] = cfg.master_seed;
  m["episode_seeds"] = seeds;
  json j;
  j["manifest"] = m;
  j["config"] = config_json(cfg);
  return j.dump(2) + "\n";
}

std::string instance_to_json(const PricingInstance<double> &inst) {
  json j;
  j["m"] = inst.m();
  j["n"] = inst.n();
  j["A"] = matrix_rows(inst.A);
  j["alpha"] = vector_json(inst.model.alpha());
  j["B"] = matrix_rows(inst.model.B());
  j["c0"] = vector_json(inst.c0);
  j["T"] = inst.T;
  j["sigma"] = inst.sigma;
  j["box"] = {inst.box.lower, inst.box.upper};
  return j.dump(2) + "\n";
}

} // namespace pricelab
