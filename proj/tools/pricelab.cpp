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

// Command-line front end: run, sweep, gen-instance, validate.
//
// Exit codes: 0 success, 1 config error, 2 runtime failure, 3 validation
// failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pricelab/config_io.hpp"
#include "pricelab/experiments.hpp"
#include "pricelab/validate.hpp"

namespace fs = std::filesystem;
using namespace pricelab;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;
constexpr int kValidationFailed = 3;

void write_text(const fs::path &path, const std::string &text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  os << text;
  if (!os) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

int execute(ExperimentConfig cfg, const std::string &out_dir, int workers,
            bool quiet) {
  if (!out_dir.empty()) {
    cfg.output = out_dir;
  }
  if (workers > 0) {
    cfg.workers = workers;
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  try {
    fs::create_directories(cfg.output);
    // Worker count does not affect results, so the manifest records 1.
    ExperimentConfig recorded = cfg;
    recorded.workers = 1;
    write_text(fs::path(cfg.output) / "manifest.json", manifest_json(recorded));
    ProgressFn progress;
    if (!quiet) {
      progress = [](std::size_t done, std::size_t total) {
        if (done == total || done % 50 == 0) {
          std::cerr << "\r" << done << "/" << total << " episode groups"
                    << std::flush;
          if (done == total) {
            std::cerr << "\n";
          }
        }
      };
    }
    const auto cells = run_grid(cfg, progress);
    const fs::path csv = fs::path(cfg.output) / "results.csv";
    emit_csv(cells, csv.string());
    int failed = 0;
    for (const AggregateCell &c : cells) {
      failed += c.failures;
    }
    if (failed > 0) {
      std::cerr << "warning: " << failed << " episodes failed\n";
    }
    std::cout << csv.string() << "\n";
  } catch (const std::exception &e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"pricelab: resource-constrained dynamic pricing simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", software_version());

  std::string config_path;
  std::string out_dir;
  int workers = 0;
  bool quiet = false;
  auto *run = app.add_subcommand("run", "execute an experiment config");
  run->add_option("--config", config_path, "JSON config or manifest")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--workers", workers, "worker threads");
  run->add_flag("--quiet", quiet, "no progress output");

  std::string kind;
  int scale = 1;
  std::vector<double> grid;
  int reps = 0;
  std::uint64_t seed = 1;
  auto *sweep = app.add_subcommand("sweep", "canned parameter sweeps");
  sweep->add_option("--kind", kind, "sweep kind")
      ->required()
      ->check(CLI::IsMember({"horizon", "epsilon0", "rho", "zeta", "sigma"}));
  sweep->add_option("--scale", scale, "instance scale")
      ->check(CLI::IsMember({1, 2}));
  sweep->add_option("--grid", grid, "grid values (horizons for horizon)");
  sweep->add_option("--reps", reps, "replications");
  sweep->add_option("--seed", seed, "master seed");
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_option("--workers", workers, "worker threads");
  sweep->add_flag("--quiet", quiet, "no progress output");

  std::string inst_out;
  int horizon = 1000;
  auto *gen = app.add_subcommand("gen-instance", "dump one generated instance");
  gen->add_option("--scale", scale, "instance scale")
      ->required()
      ->check(CLI::IsMember({1, 2}));
  gen->add_option("--seed", seed, "instance seed")->required();
  gen->add_option("--out", inst_out, "output file")->required();
  gen->add_option("--T", horizon, "horizon");

  int s1reps = 100;
  std::vector<int> only;
  auto *val = app.add_subcommand("validate", "run the acceptance checks");
  val->add_option("--workers", workers, "worker threads");
  val->add_option("--scale1-reps", s1reps, "replications for Scale-1 checks");
  val->add_option("--only", only, "subset of check ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  if (*run) {
    ExperimentConfig cfg;
    try {
      cfg = load_config_file(config_path);
    } catch (const ConfigError &e) {
      std::cerr << "config error: " << e.what() << "\n";
      return kConfigError;
    }
    return execute(cfg, out_dir, workers, quiet);
  }
  if (*sweep) {
    ExperimentConfig cfg;
    try {
      cfg = canned_sweep(sweep_param_from_string(kind), scale, grid);
    } catch (const std::invalid_argument &e) {
      std::cerr << "config error: " << e.what() << "\n";
      return kConfigError;
    }
    if (reps > 0) {
      cfg.reps = reps;
    }
    cfg.master_seed = seed;
    return execute(cfg, out_dir, workers, quiet);
  }
  if (*gen) {
    try {
      const auto inst = generate_instance(scale_preset(scale), horizon, seed);
      write_text(inst_out, instance_to_json(inst));
    } catch (const std::invalid_argument &e) {
      std::cerr << "config error: " << e.what() << "\n";
      return kConfigError;
    } catch (const std::exception &e) {
      std::cerr << "runtime error: " << e.what() << "\n";
      return kRuntimeError;
    }
    return kOk;
  }
  if (*val) {
    ValidateOptions opts;
    opts.workers = workers > 0 ? workers : 1;
    opts.scale1_reps = s1reps;
    opts.scratch_dir = fs::temp_directory_path().string();
    opts.log = [](const std::string &s) { std::cerr << s << "\n"; };
    if (only.empty()) {
      for (int i = 1; i <= 10; ++i) {
        only.push_back(i);
      }
    }
    bool all = true;
    try {
      for (int id : only) {
        const CheckResult r = run_acceptance_check(id, opts);
        std::cout << format_check(r) << std::endl;
        all = all && r.pass;
      }
    } catch (const std::exception &e) {
      std::cerr << "runtime error: " << e.what() << "\n";
      return kRuntimeError;
    }
    return all ? kOk : kValidationFailed;
  }
  return kOk;
}
