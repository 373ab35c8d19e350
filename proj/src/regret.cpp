#include "bai/regret.hpp"

#include <cmath>
#include <vector>

#include "bai/diffusion.hpp"
#include "bai/errors.hpp"
#include "bai/kernels.hpp"
#include "bai/math.hpp"
#include "bai/parallel.hpp"
#include "bai/rng.hpp"

namespace bai {

RegretEstimate estimate_from_counts(double loss, std::uint64_t wrong, std::uint64_t replications) {
  RegretEstimate e;
  e.replications = replications;
  e.low_replication_warning = replications < 1000;
  if (replications == 0) return e;
  const double n = static_cast<double>(replications);
  const double p = static_cast<double>(wrong) / n;
  e.mean = loss * p;
  if (replications > 1) {
    // plug-in sample standard deviation (denominator n - 1) of a two-valued sample
    const double var = loss * loss * p * (1.0 - p) * n / (n - 1.0);
    e.std_error = std::sqrt(var / n);
  }
  return e;
}

double regret_closed_form(double gamma, double c, const Environment& env) {
  validate(env);
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("regret_closed_form: gamma outside [0, 1]");
  const double g0 = 1.0 - gamma;
  if (env.mu1 > env.mu0) {
    const double drift = env.mu1 * gamma / env.sigma1 - env.mu0 * g0 / env.sigma0;
    return (env.mu1 - env.mu0) * std_normal_cdf(c - drift);
  }
  if (env.mu0 > env.mu1) {
    const double drift = env.mu0 * g0 / env.sigma0 - env.mu1 * gamma / env.sigma1;
    return (env.mu0 - env.mu1) * std_normal_cdf(-c - drift);
  }
  return 0.0;
}

RegretEstimate regret_monte_carlo(const PolicySpec& policy, const Environment& env,
                                  std::uint64_t replications, std::uint64_t master_seed,
                                  const MonteCarloOptions& options) {
  validate(env);
  validate(policy);
  if (replications < 2) throw DomainError("regret_monte_carlo needs at least 2 replications");

  const double gap = env.gap();
  const double loss = std::fabs(gap);
  if (gap == 0.0) return estimate_from_counts(0.0, 0, replications);

  constexpr std::size_t kBlock = 256;
  const std::size_t blocks = (replications + kBlock - 1) / kBlock;
  std::vector<std::uint64_t> arm1_counts(blocks, 0);
  const auto gamma = constant_fraction(policy.sampling);

  parallel_for(replications, options.threads, kBlock, [&](std::size_t begin, std::size_t end) {
    const std::size_t lanes = end - begin;
    std::vector<double> x1(lanes), x0(lanes);
    if (gamma) {
      for (std::size_t i = 0; i < lanes; ++i) {
        const ExperimentState s = exact_terminal_sample(env, *gamma, derive_seed(master_seed, begin + i));
        x1[i] = s.x1;
        x0[i] = s.x0;
      }
    } else {
      std::vector<std::uint64_t> seeds(lanes);
      for (std::size_t i = 0; i < lanes; ++i) seeds[i] = derive_seed(master_seed, begin + i);
      const auto states = simulate_paths(env, policy, options.steps, seeds);
      for (std::size_t i = 0; i < lanes; ++i) {
        x1[i] = states[i].x1;
        x0[i] = states[i].x0;
      }
    }
    arm1_counts[begin / kBlock] =
        kernels::count_arm1(x1, x0, env.sigma1, env.sigma0, policy.threshold_c);
  });

  std::uint64_t arm1 = 0;
  for (auto c : arm1_counts) arm1 += c;
  const std::uint64_t wrong = gap > 0.0 ? replications - arm1 : arm1;
  return estimate_from_counts(loss, wrong, replications);
}

MaxRegret max_gap_regret(double shift, double scale, double tolerance) {
  if (!(scale > 0.0)) throw DomainError("max_gap_regret: scale must be positive");
  if (!(tolerance > 0.0)) throw DomainError("max_gap_regret: tolerance must be positive");
  // d/dd [d Phi(k - d/s)] = Phi(k - d/s) - (d/s) phi(k - d/s); positive at 0.
  auto slope = [&](double d) {
    const double u = shift - d / scale;
    return std_normal_cdf(u) - (d / scale) * std_normal_pdf(u);
  };
  double lo = 0.0;
  double hi = 20.0 * scale;
  while (slope(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (slope(mid) > 0.0 ? lo : hi) = mid;
  }
  const double d = 0.5 * (lo + hi);
  return {d * std_normal_cdf(shift - d / scale), d, Branch::plus};
}

MaxRegret max_regret_at_neyman(double c, double sigma1, double sigma0, double tolerance) {
  if (!(sigma1 > 0.0) || !(sigma0 > 0.0)) throw DomainError("max_regret_at_neyman: sigma must be positive");
  if (!std::isfinite(c)) throw DomainError("max_regret_at_neyman: c must be finite");
  const double scale = sigma1 + sigma0;
  MaxRegret plus = max_gap_regret(c, scale, tolerance);
  MaxRegret minus = max_gap_regret(-c, scale, tolerance);
  minus.side = Branch::minus;
  return plus.value >= minus.value ? plus : minus;
}

}  // namespace bai
