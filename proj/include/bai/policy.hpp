#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "bai/model.hpp"

namespace bai {

// Sampling rules. Each fixes pi1, the fraction of attention given to arm 1.
struct FixedFraction {
  double gamma = 0.5;
};
struct EqualSplit {};
// Equal-split pilot of ceil(n^rho) periods, then plug-in Neyman.
struct TwoStage {
  double rho = 0.5;
};
// Re-estimates both standard deviations every `batch` observations (grid
// steps in the diffusion simulator) and re-targets the Neyman fraction.
struct AdaptivePlugIn {
  int batch = 100;
};

using SamplingRule = std::variant<FixedFraction, EqualSplit, TwoStage, AdaptivePlugIn>;

struct PolicySpec {
  SamplingRule sampling = EqualSplit{};
  double threshold_c = 0.0;
};

// Throws DomainError when a rule parameter is out of range.
void validate(const PolicySpec& policy);

PolicySpec fixed_fraction_policy(double gamma, double c = 0.0);
PolicySpec neyman_policy(double sigma1, double sigma0);

// The constant fraction of a non-adaptive rule, or nullopt for
// data-dependent rules.
std::optional<double> constant_fraction(const SamplingRule& rule);

std::string describe(const SamplingRule& rule);

struct MeanPair {
  double arm1 = 0.0;
  double arm0 = 0.0;
};

// Nature's two-point prior: state theta=1 puts means at state1 (arm 1 best),
// theta=0 at state0 (arm 0 best); m1 is the prior mass on theta=1.
struct TwoPointPrior {
  MeanPair state1;
  MeanPair state0;
  double m1 = 0.5;

  // Throws DomainError unless a1 > b1, b0 > a0 and m1 in (0, 1).
  static TwoPointPrior make(MeanPair state1, MeanPair state0, double m1);

  // Prior on (s1*D/2, -s0*D/2) vs (-s1*D/2, s0*D/2); under it every sampling
  // rule induces the same likelihood-ratio dynamics.
  static TwoPointPrior indifference(double sigma1, double sigma0, double delta, double m1 = 0.5);

  // Delta of an indifference prior, or nullopt if this prior is not one
  // (relative tolerance `tol` on each coordinate).
  std::optional<double> indifference_delta(double sigma1, double sigma0, double tol = 1e-9) const;

  Environment environment(bool theta1, double sigma1, double sigma0) const;
};

// sigma1 / (sigma1 + sigma0)
double neyman_gamma(double sigma1, double sigma0);

// Arm 1 iff x1/sigma1 - x0/sigma0 >= c. Exact ties go to arm 1.
Arm threshold_decision(const ExperimentState& state, double sigma1, double sigma0, double c);

// Bayes implementation rule under a two-point prior given ln phi(1).
Arm bayes_decision(double log_phi, const TwoPointPrior& prior);

// ln((1 - m1)/m1) / delta: the threshold induced by prior mass m1 under an
// indifference prior with separation delta.
double bayes_threshold_c(double delta, double m1);

// Policy names accepted on the command line.
enum class PolicyKind { neyman, equal, two_stage, adaptive_neyman, fixed };

struct PolicyName {
  PolicyKind kind = PolicyKind::neyman;
  double gamma = 0.5;  // only for PolicyKind::fixed

  std::string to_string() const;
};

// Parses neyman | equal | two-stage | adaptive-neyman | fixed:<gamma>.
// Throws UsageError on anything else.
PolicyName parse_policy_name(std::string_view text);

PolicySpec resolve(const PolicyName& name, double sigma1, double sigma0, double rho = 0.5,
                   int batch = 100, double c = 0.0);

}  // namespace bai
