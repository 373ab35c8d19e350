#include "bai/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "bai/errors.hpp"
#include "bai/kernels.hpp"
#include "bai/math.hpp"
#include "bai/regret.hpp"
#include "bai/rng.hpp"

namespace bai {
namespace {

void require_sigmas(double sigma1, double sigma0) {
  if (!(sigma1 > 0.0) || !(sigma0 > 0.0) || !std::isfinite(sigma1) || !std::isfinite(sigma0)) {
    throw DomainError("sigma values must be positive and finite");
  }
}

// Drift of x1/sigma1 - x0/sigma0 under fraction gamma (per unit time).
double standardized_drift(double gamma, const Environment& env) {
  return env.mu1 * gamma / env.sigma1 - env.mu0 * (1.0 - gamma) / env.sigma0;
}

// Regret of (gamma, c) at many environments, with Phi evaluated through the
// batch kernel. Same formula as regret_closed_form.
class RegretBatch {
 public:
  void add(double gamma, double c, const Environment& env) {
    const double gap = env.gap();
    if (gap > 0.0) {
      loss_.push_back(gap);
      arg_.push_back(c - standardized_drift(gamma, env));
    } else if (gap < 0.0) {
      loss_.push_back(-gap);
      arg_.push_back(-c + standardized_drift(gamma, env));
    } else {
      loss_.push_back(0.0);
      arg_.push_back(0.0);
    }
  }

  std::vector<double> evaluate() const {
    std::vector<double> out(arg_.size());
    kernels::normal_cdf(arg_, out);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= loss_[i];
    return out;
  }

 private:
  std::vector<double> loss_;
  std::vector<double> arg_;
};

}  // namespace

double boundedness_residual(double gamma, double sigma1, double sigma0) {
  require_sigmas(sigma1, sigma0);
  const double slope = 1.0 / sigma1 + 1.0 / sigma0;
  return (gamma / sigma1 - (1.0 - gamma) / sigma0) / slope;
}

NatureResponse nature_best_response(double gamma, double c, double sigma1, double sigma0,
                                    double gamma_tolerance) {
  require_sigmas(sigma1, sigma0);
  NatureResponse r;
  if (std::fabs(boundedness_residual(gamma, sigma1, sigma0)) > gamma_tolerance) {
    const auto probe = divergence_probe(gamma, c, sigma1, sigma0, 5);
    r.side = NatureSide::unbounded;
    r.value = probe.back();
    r.gap = static_cast<double>(probe.size());
    return r;
  }
  const double scale = sigma1 + sigma0;
  const MaxRegret up = max_gap_regret(c, scale);
  const MaxRegret down = max_gap_regret(-c, scale);
  r.theta1_value = up.value;
  r.theta0_value = down.value;
  if (up.value >= down.value) {
    r.side = NatureSide::theta1;
    r.gap = up.argmax_delta;
    r.value = up.value;
  } else {
    r.side = NatureSide::theta0;
    r.gap = down.argmax_delta;
    r.value = down.value;
  }
  return r;
}

double sup_regret_at_gap(double gamma, double c, double delta, NatureSide side, double sigma1,
                         double sigma0, double gamma_tolerance) {
  require_sigmas(sigma1, sigma0);
  if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("gap must be positive and finite");
  if (side == NatureSide::unbounded) throw UsageError("sup_regret_at_gap needs theta1 or theta0");
  if (std::fabs(boundedness_residual(gamma, sigma1, sigma0)) > gamma_tolerance) return delta;
  const double shift = side == NatureSide::theta1 ? c : -c;
  return delta * std_normal_cdf(shift - delta / (sigma1 + sigma0));
}

Environment probe_environment(NatureSide side, int level, double sigma1, double sigma0) {
  require_sigmas(sigma1, sigma0);
  if (level < 1) throw DomainError("probe level must be >= 1");
  const double k = level;
  const double best = -kProbeMagnitude * k;
  if (side == NatureSide::theta0) return Environment{best - k, best, sigma1, sigma0};
  return Environment{best, best - k, sigma1, sigma0};
}

std::vector<double> divergence_probe(double gamma, double c, double sigma1, double sigma0,
                                     int levels) {
  if (levels < 1) throw DomainError("divergence_probe: levels must be >= 1");
  const double residual = boundedness_residual(gamma, sigma1, sigma0);
  if (std::fabs(residual) <= 1e-12) {
    throw UsageError("divergence_probe: gamma is the Neyman fraction; regret stays bounded there");
  }
  const NatureSide side = residual > 0.0 ? NatureSide::theta1 : NatureSide::theta0;
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(levels));
  for (int k = 1; k <= levels; ++k) {
    values.push_back(regret_closed_form(gamma, c, probe_environment(side, k, sigma1, sigma0)));
  }
  return values;
}

bool certifies_unbounded(std::span<const double> values, double bound) {
  if (values.empty()) return false;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) return false;
  }
  return values.back() > bound;
}

double bayes_regret(const TwoPointPrior& prior, double gamma, double c, double sigma1,
                    double sigma0) {
  return prior.m1 * regret_closed_form(gamma, c, prior.environment(true, sigma1, sigma0)) +
         (1.0 - prior.m1) * regret_closed_form(gamma, c, prior.environment(false, sigma1, sigma0));
}

AgentResponse agent_best_response(const TwoPointPrior& prior, double sigma1, double sigma0,
                                  std::span<const double> gamma_grid,
                                  std::span<const double> c_grid, const AgentOptions& options) {
  require_sigmas(sigma1, sigma0);
  const auto delta = prior.indifference_delta(sigma1, sigma0);
  if (!delta) {
    throw UsageError("agent_best_response expects an indifference prior");
  }
  if (gamma_grid.empty() || c_grid.empty()) throw UsageError("agent_best_response: empty grid");

  AgentResponse r;
  r.c_opt = bayes_threshold_c(*delta, prior.m1);
  r.gammas.assign(gamma_grid.begin(), gamma_grid.end());
  for (double g : gamma_grid) r.bayes_regret.push_back(bayes_regret(prior, g, r.c_opt, sigma1, sigma0));
  const auto [lo, hi] = std::minmax_element(r.bayes_regret.begin(), r.bayes_regret.end());
  r.flatness = *hi - *lo;

  double best = std::numeric_limits<double>::infinity();
  for (double c : c_grid) {
    const double b = bayes_regret(prior, gamma_grid.front(), c, sigma1, sigma0);
    if (b < best) {
      best = b;
      r.c_grid_argmin = c;
    }
  }

  if (options.replications > 0) {
    MonteCarloOptions mc;
    mc.threads = options.threads;
    for (std::size_t j = 0; j < gamma_grid.size(); ++j) {
      const PolicySpec p = fixed_fraction_policy(gamma_grid[j], r.c_opt);
      const auto e1 = regret_monte_carlo(p, prior.environment(true, sigma1, sigma0),
                                         options.replications, derive_seed(options.seed, 2 * j), mc);
      const auto e0 = regret_monte_carlo(p, prior.environment(false, sigma1, sigma0),
                                         options.replications, derive_seed(options.seed, 2 * j + 1), mc);
      const double w1 = prior.m1, w0 = 1.0 - prior.m1;
      r.bayes_regret_mc.push_back(w1 * e1.mean + w0 * e0.mean);
      r.bayes_regret_mc_se.push_back(std::sqrt(w1 * w1 * e1.std_error * e1.std_error +
                                               w0 * w0 * e0.std_error * e0.std_error));
    }
  }
  return r;
}

EquilibriumSolution solve_equilibrium(double sigma1, double sigma0, double tolerance) {
  require_sigmas(sigma1, sigma0);
  if (!(tolerance > 0.0)) throw DomainError("solve_equilibrium: tolerance must be positive");

  EquilibriumSolution sol;
  sol.sigma1 = sigma1;
  sol.sigma0 = sigma0;
  sol.tolerance = tolerance;

  // gamma*: the only fraction where neither branch diverges. The residual is
  // negative at gamma = 0 (theta=0 side exploitable) and positive at 1.
  // Bisect to full double resolution; an exact zero ends the search early.
  double lo = 0.0, hi = 1.0;
  sol.gamma_star = 0.5;
  while (true) {
    const double mid = 0.5 * (lo + hi);
    sol.gamma_star = mid;
    if (mid <= lo || mid >= hi) break;
    const double r = boundedness_residual(mid, sigma1, sigma0);
    if (r == 0.0) break;
    (r < 0.0 ? lo : hi) = mid;
  }

  // c*: golden-section search on worst-case regret over c in [-1, 1].
  auto worst = [&](double c) { return max_regret_at_neyman(c, sigma1, sigma0, tolerance).value; };
  const double inv_phi = 1.0 / std::numbers::phi;
  double a = -1.0, b = 1.0;
  double c1 = b - inv_phi * (b - a), c2 = a + inv_phi * (b - a);
  double f1 = worst(c1), f2 = worst(c2);
  while (b - a > tolerance) {
    if (f1 <= f2) {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - inv_phi * (b - a);
      f1 = worst(c1);
    } else {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + inv_phi * (b - a);
      f2 = worst(c2);
    }
  }
  sol.c_star = 0.5 * (a + b);

  const double scale = sigma1 + sigma0;
  const MaxRegret nature = max_regret_at_neyman(sol.c_star, sigma1, sigma0, tolerance);
  sol.eta_star = nature.argmax_delta;
  sol.v_star = nature.value;
  sol.delta_prior_star = 2.0 * sol.eta_star / scale;
  sol.lfp = TwoPointPrior::indifference(sigma1, sigma0, sol.delta_prior_star, 0.5);

  // Nature's deviations: 201 gaps in (0, 4 s] on the least-favorable ray.
  RegretBatch nature_grid;
  constexpr int kDeltaPoints = 201;
  for (int j = 1; j <= kDeltaPoints; ++j) {
    const double d = 4.0 * scale * j / kDeltaPoints;
    const double a1 = sigma1 * d / scale, b1 = sigma0 * d / scale;
    nature_grid.add(sol.gamma_star, sol.c_star, Environment{a1, -b1, sigma1, sigma0});
    nature_grid.add(sol.gamma_star, sol.c_star, Environment{-a1, b1, sigma1, sigma0});
  }
  const auto nature_values = nature_grid.evaluate();
  const double nature_best = *std::max_element(nature_values.begin(), nature_values.end());
  sol.nature_gain = std::max(0.0, nature_best - sol.v_star);

  // Agent's deviations: 21 x 21 (gamma, c) grid, Bayes regret under the lfp.
  RegretBatch agent_grid;
  const Environment s1 = sol.lfp.environment(true, sigma1, sigma0);
  const Environment s0 = sol.lfp.environment(false, sigma1, sigma0);
  agent_grid.add(sol.gamma_star, sol.c_star, s1);
  agent_grid.add(sol.gamma_star, sol.c_star, s0);
  for (int i = 0; i <= 20; ++i) {
    const double g = sol.gamma_star - 0.1 + 0.01 * i;
    if (!(g > 0.0 && g < 1.0)) continue;
    for (int j = 0; j <= 20; ++j) {
      const double c = -1.0 + 0.1 * j;
      agent_grid.add(g, c, s1);
      agent_grid.add(g, c, s0);
    }
  }
  const auto agent_values = agent_grid.evaluate();
  const double m1 = sol.lfp.m1;
  const double at_solution = m1 * agent_values[0] + (1.0 - m1) * agent_values[1];
  double agent_best = at_solution;
  for (std::size_t k = 2; k + 1 < agent_values.size(); k += 2) {
    agent_best = std::min(agent_best, m1 * agent_values[k] + (1.0 - m1) * agent_values[k + 1]);
  }
  sol.agent_gain = std::max(0.0, at_solution - agent_best);
  sol.exploitability = std::max(sol.nature_gain, sol.agent_gain);
  return sol;
}

}  // namespace bai
