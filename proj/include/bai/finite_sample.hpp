#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "bai/kernels.hpp"
#include "bai/model.hpp"
#include "bai/policy.hpp"
#include "bai/regret.hpp"

namespace bai {

enum class Family { gaussian, bernoulli };

std::string_view to_string(Family family);
Family parse_family(std::string_view text);  // UsageError on unknown names

// Local alternative at budget n: arm a has mean h_a / sqrt(n). Gaussian
// outcomes have standard deviation base_sigma_a; Bernoulli outcomes have
// success probability 1/2 + h_a / sqrt(n), are centered by subtracting 1/2,
// and have sigma_a = 1/2 at the reference point.
struct LocalEnvironment {
  Family family = Family::gaussian;
  double h1 = 0.0;
  double h0 = 0.0;
  double base_sigma1 = 1.0;
  double base_sigma0 = 1.0;

  double sigma1() const { return family == Family::bernoulli ? 0.5 : base_sigma1; }
  double sigma0() const { return family == Family::bernoulli ? 0.5 : base_sigma0; }

  // h1 = gap/2, h0 = -gap/2
  static LocalEnvironment at_gap(Family family, double gap, double sigma1 = 1.0,
                                 double sigma0 = 1.0);
};

// Throws DomainError on invalid parameters, including Bernoulli success
// probabilities outside [0, 1] at budget n.
void validate(const LocalEnvironment& env, std::uint64_t n);

struct TrialConfig {
  std::uint64_t n = 10000;
  PolicySpec policy;
  std::uint64_t replications = 10000;
  std::uint64_t master_seed = 0;
  unsigned threads = 0;
};

struct ReplicationOutcome {
  Arm decision = Arm::arm1;
  double x1 = 0.0;  // n^{-1/2} * sum of arm-1 outcomes
  double x0 = 0.0;
  std::uint64_t n1 = 0;
  std::uint64_t n0 = 0;
  double sigma1_used = 0.0;  // sigmas handed to the implementation rule
  double sigma0_used = 0.0;
};

// One n-period experiment. Period i (1-based) goes to arm 1 iff
// q1 < gamma * i, where q1 counts earlier arm-1 periods and gamma is the
// rule's current target fraction. Known-variance rules decide with the
// environment's sigmas; two-stage and adaptive rules with their estimates.
ReplicationOutcome simulate_replication(const LocalEnvironment& env, std::uint64_t n,
                                        const PolicySpec& policy, std::uint64_t seed,
                                        const kernels::KernelTable& kt = kernels::active());

// Monte Carlo estimate of sqrt(n) * E[regret]; replication i uses
// derive_seed(master_seed, i).
RegretEstimate run_trial(const LocalEnvironment& env, const TrialConfig& config);

struct SigmaEstimate {
  double sigma1 = 0.0;
  double sigma0 = 0.0;
};

// Sample standard deviation (denominator m - 1; 0 for a single value).
double sample_sd(std::span<const double> values);

// Throws UsageError if either sequence is empty.
SigmaEstimate estimate_sigmas(std::span<const double> arm1, std::span<const double> arm0);

// Equal-split pilot of ceil(n^rho) periods, plug-in Neyman afterwards.
// Requires n^rho >= 4 (UsageError otherwise).
RegretEstimate two_stage_trial(const LocalEnvironment& env, std::uint64_t n, double rho,
                               std::uint64_t replications, std::uint64_t seed,
                               unsigned threads = 0);

struct CurveRow {
  std::uint64_t n = 0;
  double gap = 0.0;
  double h1 = 0.0;
  double h0 = 0.0;
  RegretEstimate estimate;
};

struct CurveSup {
  std::uint64_t n = 0;
  double gap = 0.0;
  RegretEstimate estimate;
};

struct CurveTable {
  std::vector<CurveRow> rows;     // n-major, gap-minor
  std::vector<CurveSup> sup_by_n; // grid-sup over gaps for each n
};

// run_trial over the (n, gap) grid with h1 = gap/2, h0 = -gap/2. Every cell
// reuses master_seed (common random numbers across cells).
CurveTable scaled_regret_curve(Family family, double sigma1, double sigma0,
                               const PolicySpec& policy, std::span<const double> gap_grid,
                               std::span<const std::uint64_t> n_grid, std::uint64_t replications,
                               std::uint64_t master_seed, unsigned threads = 0);

}  // namespace bai
