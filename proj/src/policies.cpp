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

#include "pricelab/policies.hpp"

#include <cmath>
#include <stdexcept>

namespace pricelab {

std::string to_string(PolicyKind k) {
  switch (k) {
  case PolicyKind::full_info:
    return "full_info";
  case PolicyKind::learning:
    return "learning";
  case PolicyKind::informed:
    return "informed";
  case PolicyKind::surrogate:
    return "surrogate";
  case PolicyKind::surrogate_informed:
    return "surrogate_informed";
  }
  return "unknown";
}

PolicyKind policy_kind_from_string(const std::string &s) {
  for (PolicyKind k : {PolicyKind::full_info, PolicyKind::learning,
                       PolicyKind::informed, PolicyKind::surrogate,
                       PolicyKind::surrogate_informed}) {
    if (to_string(k) == s) {
      return k;
    }
  }
  throw std::invalid_argument("unknown policy kind: " + s);
}

std::string to_string(Branch b) {
  switch (b) {
  case Branch::resolve:
    return "resolve";
  case Branch::explore:
    return "explore";
  case Branch::epoch:
    return "epoch";
  case Branch::anchor:
    return "anchor";
  case Branch::anchor_warmup:
    return "anchor_warmup";
  case Branch::infeasible:
    return "infeasible";
  }
  return "unknown";
}

void PolicyConfig::validate(Index n) const {
  if (zeta < 0 || sigma0 < 0 || !(tau > 0)) {
    throw std::invalid_argument("policy: need zeta >= 0, sigma0 >= 0, tau > 0");
  }
  const bool informed =
      kind == PolicyKind::informed || kind == PolicyKind::surrogate_informed;
  const bool surr =
      kind == PolicyKind::surrogate || kind == PolicyKind::surrogate_informed;
  if (informed) {
    if (!anchor || anchor->p0.size() != n || anchor->d0.size() != n ||
        anchor->eps0 < 0) {
      throw std::invalid_argument("policy: informed kinds need an anchor");
    }
  }
  if (surr) {
    if (!surrogate || !surrogate->model || !surrogate->offline ||
        surrogate->model->n() != n) {
      throw std::invalid_argument("policy: surrogate kinds need wiring");
    }
  }
}

InformedBranch informed_select(double eps0, int T, double tau) {
  const double lhs = eps0 * eps0 * static_cast<double>(T);
  const double rhs = tau * std::sqrt(static_cast<double>(T));
  return lhs > rhs ? InformedBranch::fallback : InformedBranch::anchor;
}

Vecd price_for_demand(const DemandParams<double> &params, const Vecd &d,
                      const std::vector<char> &at_upper, double upper) {
  const Index n = params.n();
  std::vector<Index> keep;
  for (Index j = 0; j < n; ++j) {
    if (!at_upper[static_cast<std::size_t>(j)]) {
      keep.push_back(j);
    }
  }
  Vecd p = Vecd::Constant(n, upper);
  const Index r = static_cast<Index>(keep.size());
  if (r == 0) {
    return p;
  }
  Matd Bkk(r, r);
  Vecd rhs(r);
  for (Index i = 0; i < r; ++i) {
    const Index ki = keep[static_cast<std::size_t>(i)];
    rhs(i) = d(ki) - params.alpha(ki);
    for (Index j = 0; j < n; ++j) {
      if (at_upper[static_cast<std::size_t>(j)]) {
        rhs(i) -= params.B(ki, j) * upper;
      }
    }
    for (Index j = 0; j < r; ++j) {
      Bkk(i, j) = params.B(ki, keep[static_cast<std::size_t>(j)]);
    }
  }
  const Vecd pk = Bkk.partialPivLu().solve(rhs);
  for (Index i = 0; i < r; ++i) {
    p(keep[static_cast<std::size_t>(i)]) = pk(i);
  }
  return p;
}

Vecd perturb_in_box(const Vecd &base, const Vecd &step,
                    const PriceBox<double> &box) {
  Vecd p = base + step;
  for (Index i = 0; i < p.size(); ++i) {
    const double flipped = base(i) - step(i);
    if ((p(i) > box.upper || p(i) < box.lower) && flipped <= box.upper &&
        flipped >= box.lower) {
      p(i) = flipped;
    }
  }
  return clip_to_box(p, box);
}

namespace {

double remaining(int t, int T) { return static_cast<double>(T - t + 1); }

std::vector<char> reject_below(const Vecd &d, double threshold) {
  std::vector<char> r(static_cast<std::size_t>(d.size()), 0);
  for (Index i = 0; i < d.size(); ++i) {
    r[static_cast<std::size_t>(i)] = d(i) <= threshold ? 1 : 0;
  }
  return r;
}

// Keeps an estimate usable by the fluid solver.
DemandParams<double> repaired(DemandParams<double> est) {
  est.B = repair_negative_definite(est.B);
  return est;
}

} // namespace

PolicyDecision full_info_step(const LinearDemandModel<double> &model,
                              const Matd &A, const PriceBox<double> &box,
                              const Vecd &capacity, int t, int T,
                              double zeta) {
  const Index n = model.n();
  PolicyDecision dec;
  FluidProblem<double> prob{model.params(), A, capacity / remaining(t, T), box,
                            false};
  FluidSolution<double> sol;
  try {
    sol = solve_fluid(prob);
  } catch (const FluidInfeasible &) {
    dec.price = Vecd::Constant(n, box.upper);
    dec.predicted_demand = demand_mean(model, dec.price);
    dec.rejected.assign(static_cast<std::size_t>(n), 1);
    dec.branch = Branch::infeasible;
    return dec;
  }
  dec.threshold = attraction_threshold(ThresholdKind::full_info, t, T, zeta);
  const Vecd dt = boundary_attract(sol.d, dec.threshold);
  // Rounded products get the price that zeroes their demand; products cut
  // off by a depleted resource stay at the upper bound.
  bool moved = false;
  for (Index j = 0; j < n; ++j) {
    if (!sol.removed[static_cast<std::size_t>(j)] && dt(j) != sol.d(j)) {
      moved = true;
    }
  }
  dec.price = moved ? clip_to_box(price_for_demand(model.params(), dt,
                                                   sol.removed, box.upper),
                                  box)
                    : sol.p;
  dec.predicted_demand = dt;
  dec.rejected = sol.removed;
  dec.branch = Branch::resolve;
  return dec;
}

namespace {

class FullInfoPolicy final : public Policy {
public:
  FullInfoPolicy(const MarketView &view, const PolicyConfig &cfg)
      : view_(view), cfg_(cfg), pbar_(Vecd::Zero(view.n())) {}

  PolicyDecision decide(int t, const Vecd &capacity) override {
    return full_info_step(*view_.truth, view_.A, view_.box, capacity, t,
                          view_.T, cfg_.zeta);
  }

  void observe(int t, const Vecd &p, const Vecd &, const Vecd *) override {
    pbar_ = (static_cast<double>(t - 1) / t) * pbar_ + p / static_cast<double>(t);
  }

  const Vecd &mean_price() const override { return pbar_; }

private:
  MarketView view_;
  PolicyConfig cfg_;
  Vecd pbar_;
};

// Control-variate bookkeeping shared by the surrogate kinds.
struct SurrogateTrack {
  SurrogateWiring wiring;
  SurrogateMoments<double> moments;
  Matd gamma;
  double lambda = 0.0;

  SurrogateTrack(const SurrogateWiring &w, Index n)
      : wiring(w), moments(n), gamma(Matd::Zero(n, n)) {
    lambda = w.lambda > 0 ? w.lambda
                          : default_ridge<double>(w.offline->sigma_s_off);
  }

  void observe(const Vecd &p, const Vecd &d, const Vecd &signal) {
    moments.update(p, d, signal - wiring.offline->center(p));
  }

  void refresh(const DemandParams<double> &mean_proxy) {
    if (wiring.force_zero_gamma || moments.t < 2) {
      return;
    }
    const Matd g = gamma_from_cross<double>(moments.cross_cov(mean_proxy),
                                            wiring.offline->sigma_s_off, lambda)
                       .gamma;
    if (g.allFinite()) {
      gamma = g;
    }
  }
};

class LearningPolicy final : public Policy {
public:
  LearningPolicy(const MarketView &view, const PolicyConfig &cfg, Rng rng)
      : view_(view), cfg_(cfg), rng_(std::move(rng)), n_(view.n()),
        design_(n_), pbar_(Vecd::Zero(n_)), pbar_kn_(Vecd::Zero(n_)),
        ptilde_(Vecd::Zero(n_)) {
    if (cfg.surrogate) {
      track_.emplace(*cfg.surrogate, n_);
    }
  }

  PolicyDecision decide(int t, const Vecd &capacity) override {
    PolicyDecision dec;
    if (t <= n_) {
      dec.price = uniform_vector<double>(rng_, n_, view_.box.lower,
                                         view_.box.upper);
      dec.predicted_demand = Vecd::Zero(n_);
      dec.rejected.assign(static_cast<std::size_t>(n_), 0);
      dec.branch = Branch::explore;
      return dec;
    }
    dec.branch = Branch::resolve;
    if ((t - 1) % n_ == 0) {
      refresh_epoch(t, capacity);
      dec.branch = Branch::epoch;
    }
    const long k = (t - 1) / n_;
    const Index j = static_cast<Index>(t - k * n_ - 1);
    Vecd e;
    if (cfg_.gaussian_perturbation) {
      e = normal_vector<double>(rng_, n_);
    } else {
      e = Vecd::Unit(n_, j);
    }
    const double scale = cfg_.sigma0 / std::sqrt(std::sqrt(static_cast<double>(t)));
    dec.price = perturb_in_box(pbar_ + (ptilde_ - pbar_kn_), scale * e,
                               view_.box);
    dec.predicted_demand = est_.alpha + est_.B * dec.price;
    dec.threshold =
        attraction_threshold(ThresholdKind::learning, t, view_.T, cfg_.zeta);
    dec.rejected = reject_below(dec.predicted_demand, dec.threshold);
    return dec;
  }

  void observe(int t, const Vecd &p, const Vecd &d,
               const Vecd *signal) override {
    ols_update(design_, p, d);
    if (track_ && signal) {
      track_->observe(p, d, *signal);
    }
    pbar_ = (static_cast<double>(t - 1) / t) * pbar_ + p / static_cast<double>(t);
  }

  const Vecd &mean_price() const override { return pbar_; }

private:
  void refresh_epoch(int t, const Vecd &capacity) {
    DemandParams<double> est = ols_estimate(design_);
    if (track_) {
      track_->refresh(est);
      est = ols_estimate(pseudo_design(design_, track_->moments, track_->gamma));
    }
    est = repaired(std::move(est));
    if (est.alpha.allFinite() && est.B.allFinite()) {
      est_ = est;
      have_est_ = true;
    }
    if (!have_est_) {
      est_ = DemandParams<double>{Vecd::Zero(n_), -Matd::Identity(n_, n_)};
      have_est_ = true;
    }
    FluidProblem<double> prob{est_, view_.A, capacity / remaining(t, view_.T),
                              view_.box, false};
    try {
      ptilde_ = solve_fluid(prob).p;
      have_ptilde_ = true;
    } catch (const FluidInfeasible &) {
      if (!have_ptilde_) {
        ptilde_ = pbar_;
        have_ptilde_ = true;
      }
    }
    pbar_kn_ = pbar_;
  }

  MarketView view_;
  PolicyConfig cfg_;
  Rng rng_;
  Index n_;
  DesignState<double> design_;
  Vecd pbar_;
  Vecd pbar_kn_;
  Vecd ptilde_;
  bool have_ptilde_ = false;
  DemandParams<double> est_{Vecd::Zero(0), Matd::Zero(0, 0)};
  bool have_est_ = false;
  std::optional<SurrogateTrack> track_;
};

class InformedPolicy final : public Policy {
public:
  InformedPolicy(const MarketView &view, const PolicyConfig &cfg)
      : view_(view), cfg_(cfg), n_(view.n()),
        state_(cfg.anchor->p0, cfg.anchor->d0, cfg.anchor->eps0),
        pbar_(Vecd::Zero(n_)), last_ptilde_(cfg.anchor->p0),
        bhat_(Matd::Zero(n_, n_)) {
    if (cfg.surrogate) {
      track_.emplace(*cfg.surrogate, n_);
    }
  }

  PolicyDecision decide(int t, const Vecd &capacity) override {
    PolicyDecision dec;
    const Vecd &p0 = state_.anchor_p;
    const Vecd &d0 = state_.anchor_d;
    const bool warm = warmup();
    if (track_ && !warm && (t - 1) % n_ == 0) {
      track_->refresh(anchored_estimate(state_));
    }
    const AnchoredState<double> st =
        track_ ? pseudo_anchored(state_, track_->moments, track_->gamma)
               : state_;
    Vecd ptilde;
    if (warm) {
      ptilde = p0;
      if (st.t >= 1) {
        bhat_ = anchored_estimate(st).B;
      }
      dec.branch = Branch::anchor_warmup;
    } else {
      DemandParams<double> est = anchored_estimate(st);
      est.B = repair_negative_definite(est.B);
      if (est.B.allFinite()) {
        bhat_ = est.B;
      }
      DemandParams<double> used{d0 - bhat_ * p0, bhat_};
      FluidProblem<double> prob{used, view_.A,
                                capacity / remaining(t, view_.T), view_.box,
                                false};
      try {
        last_ptilde_ = solve_fluid(prob).p;
      } catch (const FluidInfeasible &) {
      }
      ptilde = last_ptilde_;
      dec.branch = Branch::anchor;
    }
    const Index j = static_cast<Index>((t - 1) % n_);
    const double sgn = ptilde(j) - p0(j) >= 0.0 ? 1.0 : -1.0;
    dec.price = perturb_in_box(
        ptilde,
        Vecd::Unit(n_, j) * (cfg_.sigma0 * sgn / std::sqrt(static_cast<double>(t))),
        view_.box);
    dec.predicted_demand = d0 + bhat_ * (dec.price - p0);
    dec.threshold =
        attraction_threshold(ThresholdKind::informed, t, view_.T, cfg_.zeta);
    dec.rejected = reject_below(dec.predicted_demand, dec.threshold);
    return dec;
  }

  void observe(int t, const Vecd &p, const Vecd &d,
               const Vecd *signal) override {
    anchored_update(state_, p, d);
    if (track_ && signal) {
      track_->observe(p, d, *signal);
    }
    pbar_ = (static_cast<double>(t - 1) / t) * pbar_ + p / static_cast<double>(t);
  }

  const Vecd &mean_price() const override { return pbar_; }

private:
  // True until the centered design spans every price direction.
  bool warmup() const {
    if (state_.t < n_) {
      return true;
    }
    const double top = sym_lambda_max(state_.V);
    return !(sym_lambda_min(state_.V) > 1e-10 * top);
  }

  MarketView view_;
  PolicyConfig cfg_;
  Index n_;
  AnchoredState<double> state_;
  Vecd pbar_;
  Vecd last_ptilde_;
  Matd bhat_;
  std::optional<SurrogateTrack> track_;
};

} // namespace

std::unique_ptr<Policy> make_policy(const MarketView &view,
                                    const PolicyConfig &cfg, Rng rng) {
  cfg.validate(view.n());
  switch (cfg.kind) {
  case PolicyKind::full_info:
    if (!view.truth) {
      throw std::invalid_argument("full_info policy needs the true model");
    }
    return std::make_unique<FullInfoPolicy>(view, cfg);
  case PolicyKind::learning: {
    PolicyConfig plain = cfg;
    plain.surrogate.reset();
    return std::make_unique<LearningPolicy>(view, plain, std::move(rng));
  }
  case PolicyKind::surrogate:
    return std::make_unique<LearningPolicy>(view, cfg, std::move(rng));
  case PolicyKind::informed:
  case PolicyKind::surrogate_informed: {
    PolicyConfig base = cfg;
    if (cfg.kind == PolicyKind::informed) {
      base.surrogate.reset();
    }
    if (informed_select(cfg.anchor->eps0, view.T, cfg.tau) ==
        InformedBranch::fallback) {
      return std::make_unique<LearningPolicy>(view, base, std::move(rng));
    }
    return std::make_unique<InformedPolicy>(view, base);
  }
  }
  throw std::invalid_argument("make_policy: unknown kind");
}

} // namespace pricelab
