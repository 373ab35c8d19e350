#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bai/kernels.hpp"
#include "bai/model.hpp"
#include "bai/policy.hpp"

namespace bai {

struct PathConfig {
  std::uint64_t steps = 1000;  // Euler grid size on [0, 1]
  std::uint64_t seed = 0;
};

// Euler-Maruyama path of the two-arm diffusion experiment up to t = 1.
// Each step of length h = 1/steps gives arm a the fraction pi_a of the step:
//   x_a += mu_a pi_a h + sigma_a sqrt(pi_a h) Z_a,   q_a += pi_a h,
// with independent standard normal Z_1, Z_0 drawn in that order. Adaptive
// rules observe the state at grid times only. Deterministic in (env, policy,
// config).
ExperimentState simulate_path(const Environment& env, const PolicySpec& policy,
                              const PathConfig& config);

// One path per seed, advanced together through the kernel table. Path i is
// bit-identical to simulate_path(env, policy, {steps, seeds[i]}).
std::vector<ExperimentState> simulate_paths(const Environment& env, const PolicySpec& policy,
                                            std::uint64_t steps,
                                            std::span<const std::uint64_t> seeds,
                                            const kernels::KernelTable& kt = kernels::active());

// Exact terminal draw for a constant sampling fraction:
// x_a(1) ~ N(mu_a pi_a, sigma_a^2 pi_a), independent across arms.
ExperimentState exact_terminal_sample(const Environment& env, double gamma, std::uint64_t seed);

// Same, for a rule; throws UsageError if the rule is not a constant fraction.
ExperimentState exact_terminal_sample(const Environment& env, const SamplingRule& rule,
                                      std::uint64_t seed);

// ln dP1/dP0 of the data in `state` between the two states of `prior`.
double log_likelihood_ratio(const ExperimentState& state, const TwoPointPrior& prior,
                            double sigma1, double sigma0);

// P(theta = 1 | data) = m1 phi / ((1 - m1) + m1 phi), evaluated without
// overflow for any finite log_phi.
double posterior_belief(double log_phi, double m1);

}  // namespace bai
