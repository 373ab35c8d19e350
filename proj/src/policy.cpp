#include "bai/policy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "bai/errors.hpp"

namespace bai {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_sigmas(double sigma1, double sigma0, const char* who) {
  if (!(sigma1 > 0.0) || !(sigma0 > 0.0) || !std::isfinite(sigma1) || !std::isfinite(sigma0)) {
    throw DomainError(std::string(who) + ": sigma values must be positive and finite");
  }
}

bool close_rel(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace

void validate(const PolicySpec& policy) {
  if (!std::isfinite(policy.threshold_c)) throw DomainError("policy threshold must be finite");
  std::visit(overloaded{
                 [](const FixedFraction& f) {
                   if (!(f.gamma >= 0.0 && f.gamma <= 1.0)) {
                     throw DomainError("FixedFraction gamma must lie in [0, 1]");
                   }
                 },
                 [](const EqualSplit&) {},
                 [](const TwoStage& t) {
                   if (!(t.rho > 0.0 && t.rho < 1.0)) {
                     throw DomainError("TwoStage rho must lie in (0, 1)");
                   }
                 },
                 [](const AdaptivePlugIn& a) {
                   if (a.batch < 1) throw DomainError("AdaptivePlugIn batch must be positive");
                 },
             },
             policy.sampling);
}

PolicySpec fixed_fraction_policy(double gamma, double c) {
  PolicySpec p{FixedFraction{gamma}, c};
  validate(p);
  return p;
}

PolicySpec neyman_policy(double sigma1, double sigma0) {
  return fixed_fraction_policy(neyman_gamma(sigma1, sigma0));
}

std::optional<double> constant_fraction(const SamplingRule& rule) {
  if (const auto* f = std::get_if<FixedFraction>(&rule)) return f->gamma;
  if (std::holds_alternative<EqualSplit>(rule)) return 0.5;
  return std::nullopt;
}

std::string describe(const SamplingRule& rule) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const FixedFraction& f) { os << "FixedFraction(" << f.gamma << ")"; },
                 [&](const EqualSplit&) { os << "EqualSplit"; },
                 [&](const TwoStage& t) { os << "TwoStage(" << t.rho << ")"; },
                 [&](const AdaptivePlugIn& a) { os << "AdaptivePlugIn(" << a.batch << ")"; },
             },
             rule);
  return os.str();
}

TwoPointPrior TwoPointPrior::make(MeanPair state1, MeanPair state0, double m1) {
  if (!(state1.arm1 > state1.arm0)) throw DomainError("prior state theta=1 needs a1 > b1");
  if (!(state0.arm0 > state0.arm1)) throw DomainError("prior state theta=0 needs b0 > a0");
  if (!(m1 > 0.0 && m1 < 1.0)) throw DomainError("prior mass m1 must lie in (0, 1)");
  return TwoPointPrior{state1, state0, m1};
}

TwoPointPrior TwoPointPrior::indifference(double sigma1, double sigma0, double delta, double m1) {
  require_sigmas(sigma1, sigma0, "indifference prior");
  if (!(delta > 0.0)) throw DomainError("indifference prior needs delta > 0");
  const double a = 0.5 * sigma1 * delta;
  const double b = 0.5 * sigma0 * delta;
  return make({a, -b}, {-a, b}, m1);
}

std::optional<double> TwoPointPrior::indifference_delta(double sigma1, double sigma0,
                                                        double tol) const {
  const double delta = 2.0 * state1.arm1 / sigma1;
  if (!(delta > 0.0)) return std::nullopt;
  const double a = 0.5 * sigma1 * delta;
  const double b = 0.5 * sigma0 * delta;
  if (close_rel(state1.arm0, -b, tol) && close_rel(state0.arm1, -a, tol) &&
      close_rel(state0.arm0, b, tol)) {
    return delta;
  }
  return std::nullopt;
}

Environment TwoPointPrior::environment(bool theta1, double sigma1, double sigma0) const {
  const MeanPair& s = theta1 ? state1 : state0;
  return Environment{s.arm1, s.arm0, sigma1, sigma0};
}

double neyman_gamma(double sigma1, double sigma0) {
  require_sigmas(sigma1, sigma0, "neyman_gamma");
  return sigma1 / (sigma1 + sigma0);
}

Arm threshold_decision(const ExperimentState& state, double sigma1, double sigma0, double c) {
  return state.x1 / sigma1 - state.x0 / sigma0 >= c ? Arm::arm1 : Arm::arm0;
}

Arm bayes_decision(double log_phi, const TwoPointPrior& prior) {
  const double threshold = std::log((prior.state0.arm0 - prior.state0.arm1) * (1.0 - prior.m1) /
                                    ((prior.state1.arm1 - prior.state1.arm0) * prior.m1));
  return log_phi >= threshold ? Arm::arm1 : Arm::arm0;
}

double bayes_threshold_c(double delta, double m1) {
  if (!(m1 > 0.0 && m1 < 1.0)) throw DomainError("bayes_threshold_c: m1 must lie in (0, 1)");
  if (!(delta > 0.0)) throw DomainError("bayes_threshold_c: delta must be positive");
  return std::log((1.0 - m1) / m1) / delta;
}

std::string PolicyName::to_string() const {
  switch (kind) {
    case PolicyKind::neyman:
      return "neyman";
    case PolicyKind::equal:
      return "equal";
    case PolicyKind::two_stage:
      return "two-stage";
    case PolicyKind::adaptive_neyman:
      return "adaptive-neyman";
    case PolicyKind::fixed: {
      std::ostringstream os;
      os << "fixed:" << gamma;
      return os.str();
    }
  }
  return "?";
}

PolicyName parse_policy_name(std::string_view text) {
  if (text == "neyman") return {PolicyKind::neyman};
  if (text == "equal") return {PolicyKind::equal};
  if (text == "two-stage") return {PolicyKind::two_stage};
  if (text == "adaptive-neyman") return {PolicyKind::adaptive_neyman};
  constexpr std::string_view prefix = "fixed:";
  if (text.starts_with(prefix)) {
    const std::string_view num = text.substr(prefix.size());
    double g = 0.0;
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), g);
    if (ec == std::errc() && ptr == num.data() + num.size() && g >= 0.0 && g <= 1.0) {
      return {PolicyKind::fixed, g};
    }
  }
  throw UsageError("unknown policy '" + std::string(text) +
                   "' (expected neyman, equal, two-stage, adaptive-neyman or fixed:<gamma>)");
}

PolicySpec resolve(const PolicyName& name, double sigma1, double sigma0, double rho, int batch,
                   double c) {
  PolicySpec p;
  p.threshold_c = c;
  switch (name.kind) {
    case PolicyKind::neyman:
      p.sampling = FixedFraction{neyman_gamma(sigma1, sigma0)};
      break;
    case PolicyKind::equal:
      p.sampling = EqualSplit{};
      break;
    case PolicyKind::two_stage:
      p.sampling = TwoStage{rho};
      break;
    case PolicyKind::adaptive_neyman:
      p.sampling = AdaptivePlugIn{batch};
      break;
    case PolicyKind::fixed:
      p.sampling = FixedFraction{name.gamma};
      break;
  }
  validate(p);
  return p;
}

}  // namespace bai
