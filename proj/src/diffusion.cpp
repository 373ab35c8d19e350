#include "bai/diffusion.hpp"

#include <cmath>
#include <string>

#include "bai/errors.hpp"
#include "bai/rng.hpp"

namespace bai {

void validate(const Environment& env) {
  if (!std::isfinite(env.mu1) || !std::isfinite(env.mu0)) {
    throw DomainError("environment means must be finite");
  }
  if (!(env.sigma1 > 0.0) || !(env.sigma0 > 0.0) || !std::isfinite(env.sigma1) ||
      !std::isfinite(env.sigma0)) {
    throw DomainError("environment sigmas must be positive and finite");
  }
}

namespace {

// Plug-in Neyman fraction from realized quadratic variation; equal split when
// either estimate is degenerate.
double plug_in_fraction(double qv1, double q1, double qv0, double q0) {
  if (!(q1 > 0.0) || !(q0 > 0.0)) return 0.5;
  const double s1 = std::sqrt(qv1 / q1);
  const double s0 = std::sqrt(qv0 / q0);
  if (!(s1 > 0.0) || !(s0 > 0.0) || !std::isfinite(s1 + s0)) return 0.5;
  return s1 / (s1 + s0);
}

enum class RuleKind { constant, two_stage, adaptive };

struct RulePlan {
  RuleKind kind = RuleKind::constant;
  double initial = 0.5;
  std::uint64_t retarget_every = 0;  // adaptive: steps between re-estimates
  std::uint64_t pilot_steps = 0;     // two-stage: equal-split steps
};

RulePlan plan_for(const SamplingRule& rule, std::uint64_t steps) {
  RulePlan plan;
  if (auto g = constant_fraction(rule)) {
    plan.initial = *g;
    return plan;
  }
  if (const auto* t = std::get_if<TwoStage>(&rule)) {
    plan.kind = RuleKind::two_stage;
    plan.pilot_steps = static_cast<std::uint64_t>(std::ceil(std::pow(static_cast<double>(steps), t->rho)));
    return plan;
  }
  const auto& a = std::get<AdaptivePlugIn>(rule);
  plan.kind = RuleKind::adaptive;
  plan.retarget_every = static_cast<std::uint64_t>(a.batch);
  return plan;
}

}  // namespace

std::vector<ExperimentState> simulate_paths(const Environment& env, const PolicySpec& policy,
                                            std::uint64_t steps,
                                            std::span<const std::uint64_t> seeds,
                                            const kernels::KernelTable& kt) {
  validate(env);
  validate(policy);
  if (steps < 1) throw DomainError("path config needs steps >= 1");

  const std::size_t lanes = seeds.size();
  const RulePlan plan = plan_for(policy.sampling, steps);
  const bool tracks_qv = plan.kind != RuleKind::constant;

  std::vector<Rng> rngs;
  rngs.reserve(lanes);
  for (auto s : seeds) rngs.emplace_back(s);

  std::vector<double> x1(lanes, 0.0), x0(lanes, 0.0), q1(lanes, 0.0), q0(lanes, 0.0);
  std::vector<double> pi1(lanes, plan.initial), z1(lanes), z0(lanes);
  std::vector<double> prev1, prev0, qv1, qv0;
  if (tracks_qv) {
    prev1.resize(lanes);
    prev0.resize(lanes);
    qv1.assign(lanes, 0.0);
    qv0.assign(lanes, 0.0);
  }

  const kernels::StepCoefficients k{env.mu1, env.mu0, env.sigma1, env.sigma0,
                                    1.0 / static_cast<double>(steps)};
  for (std::uint64_t s = 0; s < steps; ++s) {
    const bool retarget =
        (plan.kind == RuleKind::adaptive && s > 0 && s % plan.retarget_every == 0) ||
        (plan.kind == RuleKind::two_stage && s == plan.pilot_steps);
    if (retarget) {
      for (std::size_t i = 0; i < lanes; ++i) pi1[i] = plug_in_fraction(qv1[i], q1[i], qv0[i], q0[i]);
    }
    for (std::size_t i = 0; i < lanes; ++i) {
      z1[i] = rngs[i].normal();
      z0[i] = rngs[i].normal();
    }
    if (tracks_qv) {
      prev1 = x1;
      prev0 = x0;
    }
    kt.euler_step(x1.data(), x0.data(), q1.data(), q0.data(), pi1.data(), z1.data(), z0.data(),
                  lanes, k);
    if (tracks_qv) {
      for (std::size_t i = 0; i < lanes; ++i) {
        const double d1 = x1[i] - prev1[i];
        const double d0 = x0[i] - prev0[i];
        qv1[i] += d1 * d1;
        qv0[i] += d0 * d0;
      }
    }
  }

  std::vector<ExperimentState> out(lanes);
  for (std::size_t i = 0; i < lanes; ++i) out[i] = ExperimentState{1.0, x1[i], x0[i], q1[i], q0[i]};
  return out;
}

ExperimentState simulate_path(const Environment& env, const PolicySpec& policy,
                              const PathConfig& config) {
  const std::uint64_t seed = config.seed;
  return simulate_paths(env, policy, config.steps, std::span(&seed, 1)).front();
}

ExperimentState exact_terminal_sample(const Environment& env, double gamma, std::uint64_t seed) {
  validate(env);
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("sampling fraction must lie in [0, 1]");
  Rng rng(seed);
  const double z1 = rng.normal();
  const double z0 = rng.normal();
  const double g0 = 1.0 - gamma;
  return ExperimentState{1.0, env.mu1 * gamma + env.sigma1 * std::sqrt(gamma) * z1,
                         env.mu0 * g0 + env.sigma0 * std::sqrt(g0) * z0, gamma, g0};
}

ExperimentState exact_terminal_sample(const Environment& env, const SamplingRule& rule,
                                      std::uint64_t seed) {
  const auto gamma = constant_fraction(rule);
  if (!gamma) {
    throw UsageError("exact_terminal_sample needs a constant-fraction rule, got " + describe(rule));
  }
  return exact_terminal_sample(env, *gamma, seed);
}

double log_likelihood_ratio(const ExperimentState& state, const TwoPointPrior& prior,
                            double sigma1, double sigma0) {
  const double a1 = prior.state1.arm1, b1 = prior.state1.arm0;
  const double a0 = prior.state0.arm1, b0 = prior.state0.arm0;
  const double v1 = sigma1 * sigma1, v0 = sigma0 * sigma0;
  return (a1 - a0) * state.x1 / v1 + (b1 - b0) * state.x0 / v0 -
         (a1 * a1 - a0 * a0) * state.q1 / (2.0 * v1) - (b1 * b1 - b0 * b0) * state.q0 / (2.0 * v0);
}

double posterior_belief(double log_phi, double m1) {
  if (!(m1 > 0.0 && m1 < 1.0)) throw DomainError("posterior_belief: m1 must lie in (0, 1)");
  if (log_phi >= 0.0) {
    return m1 / (m1 + (1.0 - m1) * std::exp(-log_phi));
  }
  const double w = m1 * std::exp(log_phi);
  return w / ((1.0 - m1) + w);
}

}  // namespace bai
