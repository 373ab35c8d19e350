#include "bai/finite_sample.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <type_traits>

#include "bai/errors.hpp"
#include "bai/parallel.hpp"
#include "bai/rng.hpp"

namespace bai {

std::string_view to_string(Family family) {
  return family == Family::bernoulli ? "bernoulli" : "gaussian";
}

Family parse_family(std::string_view text) {
  if (text == "gaussian") return Family::gaussian;
  if (text == "bernoulli") return Family::bernoulli;
  throw UsageError("unknown family '" + std::string(text) + "' (expected gaussian or bernoulli)");
}

LocalEnvironment LocalEnvironment::at_gap(Family family, double gap, double sigma1, double sigma0) {
  return {family, 0.5 * gap, -0.5 * gap, sigma1, sigma0};
}

void validate(const LocalEnvironment& env, std::uint64_t n) {
  if (n < 2) throw DomainError("finite-sample budget n must be at least 2");
  if (!std::isfinite(env.h1) || !std::isfinite(env.h0))
    throw DomainError("local parameters h must be finite");
  if (env.family == Family::gaussian) {
    if (!(env.base_sigma1 > 0.0) || !(env.base_sigma0 > 0.0) || !std::isfinite(env.base_sigma1) ||
        !std::isfinite(env.base_sigma0))
      throw DomainError("Gaussian standard deviations must be positive and finite");
    return;
  }
  const double root_n = std::sqrt(static_cast<double>(n));
  for (double h : {env.h1, env.h0}) {
    if (std::fabs(h) / root_n > 0.5)
      throw DomainError("Bernoulli success probability 1/2 + h/sqrt(n) falls outside [0, 1]");
  }
}

namespace {

struct Moments {
  double sum = 0.0;
  double sumsq = 0.0;
  std::uint64_t count = 0;

  double sd() const {
    if (count < 2) return 0.0;
    const double m = static_cast<double>(count);
    const double var = (sumsq - sum * sum / m) / (m - 1.0);
    return var > 0.0 ? std::sqrt(var) : 0.0;
  }
};

// Target fraction and decision sigmas from estimated standard deviations,
// falling back to an equal split with unit sigmas when either is degenerate.
struct PlugIn {
  double gamma = 0.5;
  double sigma1 = 1.0;
  double sigma0 = 1.0;
};

PlugIn plug_in(const Moments& a1, const Moments& a0) {
  const double s1 = a1.sd();
  const double s0 = a0.sd();
  if (!(s1 > 0.0) || !(s0 > 0.0)) return {};
  return {neyman_gamma(s1, s0), s1, s0};
}

std::uint64_t pilot_length(std::uint64_t n, double rho) {
  const double raw = std::pow(static_cast<double>(n), rho);
  if (raw < 4.0) throw UsageError("two-stage pilot n^rho must be at least 4");
  return std::min<std::uint64_t>(n, static_cast<std::uint64_t>(std::ceil(raw)));
}

constexpr std::size_t kChunk = 1024;
constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();

}  // namespace

ReplicationOutcome simulate_replication(const LocalEnvironment& env, std::uint64_t n,
                                        const PolicySpec& policy, std::uint64_t seed,
                                        const kernels::KernelTable& kt) {
  validate(env, n);
  validate(policy);

  const double root_n = std::sqrt(static_cast<double>(n));
  const double mean1 = env.h1 / root_n;
  const double mean0 = env.h0 / root_n;
  const kernels::GaussianArms gaussian{mean1, env.sigma1(), mean0, env.sigma0()};
  const kernels::BernoulliArms bernoulli{0.5 + mean1, 0.5 + mean0};

  double gamma = 0.5;
  std::uint64_t boundary = kNever;
  std::uint64_t batch = 0;
  bool estimated = false;
  std::visit(
      [&](const auto& rule) {
        using R = std::decay_t<decltype(rule)>;
        if constexpr (std::is_same_v<R, FixedFraction>) {
          gamma = rule.gamma;
        } else if constexpr (std::is_same_v<R, TwoStage>) {
          boundary = pilot_length(n, rule.rho);
          estimated = true;
        } else if constexpr (std::is_same_v<R, AdaptivePlugIn>) {
          batch = static_cast<std::uint64_t>(rule.batch);
          boundary = batch;
          estimated = true;
        }
      },
      policy.sampling);

  Rng rng(seed);
  std::array<double, kChunk> variates;
  std::array<std::uint8_t, kChunk> arms;
  kernels::ArmSums acc;
  std::uint64_t q1 = 0;
  std::uint64_t done = 0;
  PlugIn current;

  while (done < n) {
    const std::uint64_t stop = std::min({n, done + kChunk, boundary});
    const std::size_t len = static_cast<std::size_t>(stop - done);
    for (std::size_t j = 0; j < len; ++j) {
      const double period = static_cast<double>(done + j + 1);
      const bool to_arm1 = static_cast<double>(q1) < gamma * period;
      arms[j] = to_arm1 ? 1 : 0;
      q1 += to_arm1 ? 1 : 0;
    }
    const std::span<double> v(variates.data(), len);
    if (env.family == Family::gaussian) {
      rng.fill_normal(v);
      kt.accumulate_gaussian(variates.data(), arms.data(), len, gaussian, acc);
    } else {
      rng.fill_uniform(v);
      kt.accumulate_bernoulli(variates.data(), arms.data(), len, bernoulli, acc);
    }
    done = stop;
    if (done == boundary) {
      current = plug_in({acc.sum1, acc.sumsq1, q1}, {acc.sum0, acc.sumsq0, done - q1});
      gamma = current.gamma;
      boundary = batch > 0 ? boundary + batch : kNever;
    }
  }

  ReplicationOutcome out;
  out.n1 = q1;
  out.n0 = n - q1;
  out.x1 = acc.sum1 / root_n;
  out.x0 = acc.sum0 / root_n;
  if (!estimated) {
    out.sigma1_used = env.sigma1();
    out.sigma0_used = env.sigma0();
  } else {
    // two-stage keeps its pilot estimate; adaptive re-estimates from all data
    if (batch > 0) current = plug_in({acc.sum1, acc.sumsq1, out.n1}, {acc.sum0, acc.sumsq0, out.n0});
    out.sigma1_used = current.sigma1;
    out.sigma0_used = current.sigma0;
  }
  const ExperimentState terminal{1.0, out.x1, out.x0, 0.0, 0.0};
  out.decision = threshold_decision(terminal, out.sigma1_used, out.sigma0_used, policy.threshold_c);
  return out;
}

RegretEstimate run_trial(const LocalEnvironment& env, const TrialConfig& config) {
  validate(env, config.n);
  validate(config.policy);
  if (config.replications < 2) throw DomainError("run_trial needs at least 2 replications");
  if (const auto* t = std::get_if<TwoStage>(&config.policy.sampling)) pilot_length(config.n, t->rho);

  const double loss = std::fabs(env.h1 - env.h0);
  if (loss == 0.0) return estimate_from_counts(0.0, 0, config.replications);
  const Arm best = env.h1 > env.h0 ? Arm::arm1 : Arm::arm0;

  constexpr std::size_t kGrain = 64;
  const std::size_t chunks = (config.replications + kGrain - 1) / kGrain;
  std::vector<std::uint64_t> wrong_counts(chunks, 0);
  const kernels::KernelTable& kt = kernels::active();
  parallel_for(config.replications, config.threads, kGrain, [&](std::size_t begin, std::size_t end) {
    std::uint64_t wrong = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const auto r = simulate_replication(env, config.n, config.policy,
                                          derive_seed(config.master_seed, i), kt);
      wrong += r.decision != best ? 1 : 0;
    }
    wrong_counts[begin / kGrain] = wrong;
  });

  std::uint64_t wrong = 0;
  for (auto w : wrong_counts) wrong += w;
  return estimate_from_counts(loss, wrong, config.replications);
}

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

SigmaEstimate estimate_sigmas(std::span<const double> arm1, std::span<const double> arm0) {
  if (arm1.empty() || arm0.empty()) throw UsageError("estimate_sigmas: each arm needs at least one observation");
  return {sample_sd(arm1), sample_sd(arm0)};
}

RegretEstimate two_stage_trial(const LocalEnvironment& env, std::uint64_t n, double rho,
                               std::uint64_t replications, std::uint64_t seed, unsigned threads) {
  TrialConfig config;
  config.n = n;
  config.policy.sampling = TwoStage{rho};
  config.replications = replications;
  config.master_seed = seed;
  config.threads = threads;
  return run_trial(env, config);
}

CurveTable scaled_regret_curve(Family family, double sigma1, double sigma0,
                               const PolicySpec& policy, std::span<const double> gap_grid,
                               std::span<const std::uint64_t> n_grid, std::uint64_t replications,
                               std::uint64_t master_seed, unsigned threads) {
  if (gap_grid.empty() || n_grid.empty()) throw UsageError("scaled_regret_curve: empty grid");
  CurveTable table;
  table.rows.reserve(gap_grid.size() * n_grid.size());
  for (std::uint64_t n : n_grid) {
    CurveSup sup{n, 0.0, {}};
    bool first = true;
    for (double gap : gap_grid) {
      const LocalEnvironment env = LocalEnvironment::at_gap(family, gap, sigma1, sigma0);
      TrialConfig config{n, policy, replications, master_seed, threads};
      const RegretEstimate e = run_trial(env, config);
      table.rows.push_back({n, gap, env.h1, env.h0, e});
      if (first || e.mean > sup.estimate.mean) sup = {n, gap, e};
      first = false;
    }
    table.sup_by_n.push_back(sup);
  }
  return table;
}

}  // namespace bai
