#pragma once

#include <cstdint>

#include "bai/model.hpp"
#include "bai/policy.hpp"

namespace bai {

struct RegretEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t replications = 0;
  // Set when replications < 1000; the standard error is then unreliable.
  bool low_replication_warning = false;
};

// Builds an estimate from per-replication regrets that take only the values
// 0 and `loss` (misidentification count `wrong` out of `replications`).
RegretEstimate estimate_from_counts(double loss, std::uint64_t wrong, std::uint64_t replications);

// Frequentist regret of the rule (constant fraction gamma, threshold c) in
// the diffusion limit, in closed form.
double regret_closed_form(double gamma, double c, const Environment& env);

struct MonteCarloOptions {
  unsigned threads = 0;        // 0: machine parallelism
  std::uint64_t steps = 1000;  // Euler grid for data-dependent rules
};

// Monte Carlo regret. Constant-fraction rules use the exact terminal sampler;
// other rules are simulated on the Euler grid. The implementation rule is
// threshold_decision with the environment's sigmas and the policy's c.
// Replication i is seeded with derive_seed(master_seed, i).
RegretEstimate regret_monte_carlo(const PolicySpec& policy, const Environment& env,
                                  std::uint64_t replications, std::uint64_t master_seed,
                                  const MonteCarloOptions& options = {});

enum class Branch { plus, minus };

struct MaxRegret {
  double value = 0.0;
  double argmax_delta = 0.0;
  Branch side = Branch::plus;
};

// max_delta delta * Phi(shift - delta / scale) over delta > 0, by bisection on
// the sign of the derivative over [0, 20 * scale] (widened if the slope is
// still positive there).
MaxRegret max_gap_regret(double shift, double scale, double tolerance = 1e-9);

// Worst-case regret of (Neyman fraction, threshold c): the larger of the
// theta=1 branch (shift +c) and the theta=0 branch (shift -c).
MaxRegret max_regret_at_neyman(double c, double sigma1, double sigma0, double tolerance = 1e-9);

}  // namespace bai
