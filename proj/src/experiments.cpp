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

#include "pricelab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

namespace pricelab {

void ScaleSpec::validate() const {
  if (m < 1 || n < 1 || !(alpha_lo <= alpha_hi) || !(b_lo <= b_hi) ||
      !(box_lower >= 0) || !(box_upper > box_lower) || !(sigma >= 0) ||
      !(shift_margin >= 0) || !(near_zero_demand >= 0) || !(box_scale > 0)) {
    throw std::invalid_argument("scale: invalid specification");
  }
}

ScaleSpec scale_preset(int scale) {
  ScaleSpec s;
  if (scale == 1) {
    s.label = "scale1";
    s.m = 10;
    s.n = 20;
  } else if (scale == 2) {
    s.label = "scale2";
    s.m = 1;
    s.n = 4;
  } else {
    throw std::invalid_argument("scale must be 1 or 2");
  }
  return s;
}

std::string to_string(BoxRule r) {
  switch (r) {
  case BoxRule::fixed:
    return "fixed";
  case BoxRule::nonnegative:
    return "nonnegative";
  case BoxRule::scaled:
    return "scaled";
  }
  return "fixed";
}

BoxRule box_rule_from_string(const std::string &s) {
  for (BoxRule r : {BoxRule::fixed, BoxRule::nonnegative, BoxRule::scaled}) {
    if (to_string(r) == s) {
      return r;
    }
  }
  throw std::invalid_argument("unknown box rule: " + s);
}

double nonnegative_upper(const DemandParams<double> &params, double lower,
                         double cap) {
  double u = cap;
  for (Index j = 0; j < params.n(); ++j) {
    double pos = 0.0;
    double neg = 0.0;
    for (Index k = 0; k < params.n(); ++k) {
      const double b = params.B(j, k);
      (b > 0 ? pos : neg) += b;
    }
    // alpha_j + lower * pos + u * neg >= 0
    if (neg < 0) {
      u = std::min(u, (params.alpha(j) + lower * pos) / -neg);
    } else if (params.alpha(j) + lower * pos < 0) {
      return lower;
    }
  }
  return u;
}

Vecd box_optimal_demand(const LinearDemandModel<double> &model,
                        const PriceBox<double> &box) {
  FluidProblem<double> prob{model.params(), Matd(0, model.n()), Vecd(0), box,
                            true};
  return solve_fluid(prob).d;
}

namespace {

// Lowers alpha_j until the box-optimal demand of product j equals target.
LinearDemandModel<double> pull_demand_to(const LinearDemandModel<double> &model,
                                         const PriceBox<double> &box, Index j,
                                         double target) {
  Vecd alpha = model.alpha();
  auto demand_at = [&](double a) {
    Vecd al = alpha;
    al(j) = a;
    return box_optimal_demand(LinearDemandModel<double>(al, model.B()), box)(j);
  };
  double lo = 0.0;
  double hi = alpha(j);
  if (demand_at(lo) > target || demand_at(hi) < target) {
    throw GenerationFailed("near-zero demand target out of reach");
  }
  for (int k = 0; k < 200 && hi - lo > 1e-15 * (1.0 + hi); ++k) {
    const double mid = 0.5 * (lo + hi);
    (demand_at(mid) < target ? lo : hi) = mid;
  }
  alpha(j) = hi;
  if (std::abs(demand_at(hi) - target) > 1e-8) {
    throw GenerationFailed("near-zero demand target not met");
  }
  return LinearDemandModel<double>(alpha, model.B());
}

} // namespace

PricingInstance<double> generate_instance(const ScaleSpec &scale, int T,
                                          std::uint64_t seed) {
  scale.validate();
  if (T < 1) {
    throw std::invalid_argument("generate_instance: T < 1");
  }
  const Index m = scale.m;
  const Index n = scale.n;
  for (std::uint64_t attempt = 0; attempt < 10; ++attempt) {
    Rng rng(derive_seed(seed, {attempt}));
    const Matd A = uniform_matrix<double>(rng, m, n, 0.0, 1.0);
    const Vecd alpha =
        uniform_vector<double>(rng, n, scale.alpha_lo, scale.alpha_hi);
    Matd B = uniform_matrix<double>(rng, n, n, scale.b_lo, scale.b_hi);
    B -= (sym_lambda_max(B) + scale.shift_margin) * Matd::Identity(n, n);
    try {
      LinearDemandModel<double> model(alpha, B);
      double upper = scale.box_upper;
      if (scale.box_rule == BoxRule::nonnegative) {
        upper = nonnegative_upper(model.params(), scale.box_lower,
                                  scale.box_upper);
      } else if (scale.box_rule == BoxRule::scaled) {
        // Optimal prices with the upper bound effectively removed.
        const PriceBox<double> wide(scale.box_lower, 1e6, n);
        const Vecd pstar = inverse_demand(model, box_optimal_demand(model, wide));
        upper = std::min(scale.box_upper, scale.box_scale * pstar.maxCoeff());
      }
      if (!(upper > scale.box_lower)) {
        continue;
      }
      const PriceBox<double> box(scale.box_lower, upper, n);
      Vecd dstar = box_optimal_demand(model, box);
      if (scale.near_zero_demand > 0) {
        Index j = 0;
        dstar.minCoeff(&j);
        model = pull_demand_to(model, box, j, scale.near_zero_demand);
        dstar = box_optimal_demand(model, box);
      }
      PricingInstance<double> inst{model, A, static_cast<double>(T) * (A * dstar),
                                   T, scale.sigma, box};
      inst.validate();
      if (!inst.c0.allFinite()) {
        continue;
      }
      return inst;
    } catch (const std::exception &) {
      continue;
    }
  }
  throw GenerationFailed("generate_instance: no valid instance in 10 tries");
}

std::string to_string(SweepParam p) {
  switch (p) {
  case SweepParam::none:
    return "none";
  case SweepParam::horizon:
    return "horizon";
  case SweepParam::epsilon0:
    return "epsilon0";
  case SweepParam::rho:
    return "rho";
  case SweepParam::zeta:
    return "zeta";
  case SweepParam::sigma:
    return "sigma";
  }
  return "none";
}

SweepParam sweep_param_from_string(const std::string &s) {
  for (SweepParam p : {SweepParam::none, SweepParam::horizon,
                       SweepParam::epsilon0, SweepParam::rho, SweepParam::zeta,
                       SweepParam::sigma}) {
    if (to_string(p) == s) {
      return p;
    }
  }
  throw std::invalid_argument("unknown sweep parameter: " + s);
}

void ExperimentConfig::validate() const {
  scale.validate();
  if (horizons.empty() || reps < 1 || policies.empty() || workers < 1) {
    throw std::invalid_argument(
        "config: need horizons, policies, reps >= 1, workers >= 1");
  }
  for (int T : horizons) {
    if (T < 1) {
      throw std::invalid_argument("config: horizons must be >= 1");
    }
  }
  if (sweep.param != SweepParam::none && sweep.param != SweepParam::horizon &&
      sweep.grid.empty()) {
    throw std::invalid_argument("config: sweep grid is empty");
  }
  for (const PolicySpec &p : policies) {
    if (p.zeta < 0 || p.sigma0 < 0 || !(p.tau > 0) || p.eps0 < 0 ||
        !(p.rho > -1 && p.rho < 1) || p.offline_n < scale.n + 1 ||
        p.misspec < 0 || (p.noise_sd && *p.noise_sd < 0)) {
      throw std::invalid_argument("config: invalid policy '" + p.label() + "'");
    }
  }
}

void aggregate(AggregateCell &cell) {
  double sum = 0.0;
  int k = 0;
  for (double v : cell.values) {
    if (std::isfinite(v)) {
      sum += v;
      ++k;
    }
  }
  cell.reps = k;
  cell.failures = static_cast<int>(cell.values.size()) - k;
  if (k == 0) {
    cell.mean_regret = cell.std = cell.stderr_ =
        std::numeric_limits<double>::quiet_NaN();
    return;
  }
  cell.mean_regret = sum / k;
  double ss = 0.0;
  for (double v : cell.values) {
    if (std::isfinite(v)) {
      ss += (v - cell.mean_regret) * (v - cell.mean_regret);
    }
  }
  cell.std = k > 1 ? std::sqrt(ss / (k - 1)) : 0.0;
  cell.stderr_ = cell.std / std::sqrt(static_cast<double>(k));
}

std::uint64_t episode_seed(std::uint64_t master, int rep) {
  return derive_seed(master, {0x7265700000000000ULL,
                              static_cast<std::uint64_t>(rep)});
}

Anchor make_anchor(const PricingInstance<double> &inst, double eps0,
                   Rng &rng) {
  FluidProblem<double> prob{inst.model.params(), inst.A,
                            inst.c0 / static_cast<double>(inst.T), inst.box,
                            false};
  Anchor a;
  a.p0 = solve_fluid(prob).p;
  Vecd u = normal_vector<double>(rng, inst.n());
  u /= u.norm();
  a.d0 = demand_mean(inst.model, a.p0) + eps0 * u;
  a.eps0 = eps0;
  return a;
}

SurrogateBundle make_surrogate(const PricingInstance<double> &inst, double rho,
                               double noise_sd, int offline_n, double misspec,
                               Rng &rng) {
  const Index n = inst.n();
  const Vecd fb = uniform_vector<double>(rng, n, -1.0, 1.0);
  const Matd fs = uniform_matrix<double>(rng, n, n, -1.0, 1.0);
  Vecd bias = inst.model.alpha().cwiseProduct(
      (Vecd::Ones(n) + misspec * fb).eval());
  Matd slope = inst.model.B().cwiseProduct(
      (Matd::Ones(n, n) + misspec * fs).eval());
  auto model = std::make_shared<SurrogateModel<double>>(
      std::move(bias), std::move(slope), rho, noise_sd, inst.sigma);
  auto offline = std::make_shared<OfflineDataset<double>>(
      build_offline_dataset<double>(*model, offline_n, inst.box, inst.sigma,
                                    rng));
  return {model, offline};
}

PolicyConfig realize_policy(const PolicySpec &spec,
                            const PricingInstance<double> &inst,
                            std::uint64_t ep_seed) {
  PolicyConfig cfg;
  cfg.kind = spec.kind;
  cfg.zeta = spec.zeta;
  cfg.sigma0 = spec.sigma0;
  cfg.tau = spec.tau;
  cfg.gaussian_perturbation = spec.gaussian_perturbation;
  if (spec.kind == PolicyKind::informed ||
      spec.kind == PolicyKind::surrogate_informed) {
    const double eps0 =
        spec.eps0_power ? std::pow(static_cast<double>(inst.T), *spec.eps0_power)
                        : spec.eps0;
    Rng rng = make_stream(ep_seed, Stream::anchor);
    cfg.anchor = make_anchor(inst, eps0, rng);
  }
  if (spec.kind == PolicyKind::surrogate ||
      spec.kind == PolicyKind::surrogate_informed) {
    Rng rng = make_stream(ep_seed, Stream::surrogate_offline);
    SurrogateBundle b =
        make_surrogate(inst, spec.rho, spec.noise_sd.value_or(inst.sigma),
                       spec.offline_n, spec.misspec, rng);
    cfg.surrogate = SurrogateWiring{b.model, b.offline, spec.lambda,
                                    spec.force_zero_gamma};
  }
  return cfg;
}

std::vector<AggregateCell> run_grid(const ExperimentConfig &cfg,
                                    const ProgressFn &progress) {
  cfg.validate();
  std::vector<int> horizons = cfg.horizons;
  if (cfg.sweep.param == SweepParam::horizon && !cfg.sweep.grid.empty()) {
    horizons.clear();
    for (double v : cfg.sweep.grid) {
      horizons.push_back(static_cast<int>(std::lround(v)));
    }
  }
  const bool valued = cfg.sweep.param != SweepParam::none &&
                      cfg.sweep.param != SweepParam::horizon;
  const std::vector<double> values =
      valued ? cfg.sweep.grid : std::vector<double>{0.0};
  const std::size_t nT = horizons.size();
  const std::size_t nV = values.size();
  const std::size_t nP = cfg.policies.size();
  const std::size_t reps = static_cast<std::size_t>(cfg.reps);

  std::vector<AggregateCell> cells(nT * nV * nP);
  for (std::size_t it = 0; it < nT; ++it) {
    for (std::size_t iv = 0; iv < nV; ++iv) {
      for (std::size_t ip = 0; ip < nP; ++ip) {
        AggregateCell &c = cells[(it * nV + iv) * nP + ip];
        c.policy = cfg.policies[ip].label();
        c.T = horizons[it];
        c.sweep_param = to_string(cfg.sweep.param);
        c.sweep_value = cfg.sweep.param == SweepParam::horizon
                            ? static_cast<double>(horizons[it])
                            : values[iv];
        c.values.assign(reps, std::numeric_limits<double>::quiet_NaN());
      }
    }
  }

  const std::size_t total = nT * nV * reps;
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mu;
  EpisodeOptions opts;
  opts.curtailment = cfg.curtailment;
  opts.observe_rejected = cfg.observe_rejected;

  auto work = [&]() {
    while (true) {
      const std::size_t job = next.fetch_add(1);
      if (job >= total) {
        return;
      }
      const std::size_t rep = job % reps;
      const std::size_t iv = (job / reps) % nV;
      const std::size_t it = job / (reps * nV);
      const int T = horizons[it];
      const std::uint64_t ep = episode_seed(cfg.master_seed, static_cast<int>(rep));
      try {
        PricingInstance<double> inst = generate_instance(
            cfg.scale, T, derive_seed(ep, {static_cast<std::uint64_t>(Stream::instance)}));
        if (cfg.sweep.param == SweepParam::sigma) {
          inst.sigma = values[iv];
        }
        EpisodeOptions o = opts;
        o.fluid_value = fluid_value(inst);
        for (std::size_t ip = 0; ip < nP; ++ip) {
          PolicySpec spec = cfg.policies[ip];
          switch (cfg.sweep.param) {
          case SweepParam::epsilon0:
            spec.eps0 = values[iv];
            spec.eps0_power.reset();
            break;
          case SweepParam::rho:
            spec.rho = values[iv];
            break;
          case SweepParam::zeta:
            spec.zeta = values[iv];
            break;
          default:
            break;
          }
          double regret = std::numeric_limits<double>::quiet_NaN();
          try {
            const PolicyConfig pc = realize_policy(spec, inst, ep);
            regret = run_episode(inst, pc, ep, o).regret;
          } catch (const std::exception &) {
          }
          cells[(it * nV + iv) * nP + ip].values[rep] = regret;
        }
      } catch (const std::exception &) {
        // Instance failure: every policy in this job keeps NaN.
      }
      const std::size_t d = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mu);
        progress(d, total);
      }
    }
  };

  const int nw = std::max(1, std::min<int>(cfg.workers, static_cast<int>(total)));
  if (nw == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nw; ++w) {
      pool.emplace_back(work);
    }
    for (std::thread &th : pool) {
      th.join();
    }
  }
  for (AggregateCell &c : cells) {
    aggregate(c);
  }
  return cells;
}

ScalingFit fit_scaling_exponent(const std::vector<double> &T,
                                const std::vector<double> &mean_regret) {
  if (T.size() != mean_regret.size()) {
    throw std::invalid_argument("fit_scaling_exponent: size mismatch");
  }
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < T.size(); ++i) {
    if (mean_regret[i] > 0 && T[i] > 0 && std::isfinite(mean_regret[i])) {
      x.push_back(std::log(T[i]));
      y.push_back(std::log(mean_regret[i]));
    }
  }
  if (x.size() < 3) {
    throw NotFittable("fit_scaling_exponent: fewer than 3 positive points");
  }
  const double k = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / k;
    my += y[i] / k;
  }
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0)) {
    throw NotFittable("fit_scaling_exponent: horizons are not distinct");
  }
  ScalingFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace

void emit_csv(const std::vector<AggregateCell> &cells, std::ostream &os) {
  os << "policy,T,sweep_param,sweep_value,reps,mean_regret,std,stderr\n";
  for (const AggregateCell &c : cells) {
    os << c.policy << ',' << c.T << ',' << c.sweep_param << ','
       << fmt(c.sweep_value) << ',' << c.reps << ',' << fmt(c.mean_regret)
       << ',' << fmt(c.std) << ',' << fmt(c.stderr_) << '\n';
  }
}

void emit_csv(const std::vector<AggregateCell> &cells,
              const std::string &path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  emit_csv(cells, os);
  if (!os) {
    throw std::runtime_error("write failed: " + path);
  }
}

ExperimentConfig canned_sweep(SweepParam kind, int scale,
                              const std::vector<double> &grid) {
  ExperimentConfig cfg;
  cfg.scale = scale_preset(scale);
  cfg.reps = 100;
  PolicySpec full;
  full.kind = PolicyKind::full_info;
  PolicySpec learn;
  learn.kind = PolicyKind::learning;
  PolicySpec informed;
  informed.kind = PolicyKind::informed;
  cfg.sweep.param = kind;
  switch (kind) {
  case SweepParam::horizon:
    cfg.horizons = {50, 100, 200, 400, 800, 1600};
    informed.eps0_power = -0.5;
    cfg.policies = {full, learn, informed};
    break;
  case SweepParam::epsilon0: {
    cfg.horizons = {400, 1600};
    cfg.reps = 300;
    cfg.policies = {informed, full, learn};
    // Log grid from 1600^{-1/2} to 1.
    for (int i = 0; i <= 8; ++i) {
      cfg.sweep.grid.push_back(std::pow(0.025, 1.0 - i / 8.0));
    }
    break;
  }
  case SweepParam::rho: {
    cfg.horizons = {1000};
    cfg.scale = scale_preset(scale);
    PolicySpec surr;
    surr.kind = PolicyKind::surrogate;
    cfg.policies = {learn, surr};
    cfg.sweep.grid = {0.0, 0.3, 0.5, 0.7, 0.9};
    break;
  }
  case SweepParam::zeta:
    cfg.horizons = {500};
    cfg.policies = {full, learn, informed};
    cfg.sweep.grid = {0.0, 1.0, 2.0, 5.0, 10.0};
    break;
  case SweepParam::sigma:
    cfg.horizons = {500};
    cfg.policies = {full, learn, informed};
    cfg.sweep.grid = {0.1, 0.2, 0.5, 1.0, 2.0, 5.0};
    break;
  case SweepParam::none:
    throw std::invalid_argument("canned_sweep: no sweep kind");
  }
  if (!grid.empty()) {
    if (kind == SweepParam::horizon) {
      cfg.horizons.clear();
      for (double v : grid) {
        cfg.horizons.push_back(static_cast<int>(std::lround(v)));
      }
    } else {
      cfg.sweep.grid = grid;
    }
  }
  if (kind == SweepParam::horizon) {
    cfg.sweep.grid.clear();
  }
  cfg.output = "out/sweep_" + to_string(kind) + "_scale" + std::to_string(scale);
  return cfg;
}

} // namespace pricelab
