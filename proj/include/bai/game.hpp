#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bai/policy.hpp"

namespace bai {

// Signed distance of gamma from the unique fraction at which neither of
// nature's branches can push regret to infinity, in units of gamma:
// positive when arm 1 is over-sampled relative to its noise, i.e. when
// gamma/sigma1 > (1-gamma)/sigma0.
double boundedness_residual(double gamma, double sigma1, double sigma0);

enum class NatureSide { theta1, theta0, unbounded };

struct NatureResponse {
  double gap = 0.0;    // |a - b| chosen by nature (probe gap when unbounded)
  double value = 0.0;  // regret attained (last probe value when unbounded)
  NatureSide side = NatureSide::theta1;
  double theta1_value = 0.0;
  double theta0_value = 0.0;
};

// Nature's best response to (gamma, c). At the Neyman fraction (within
// `gamma_tolerance`) this is the gap maximizing the larger branch; anywhere
// else regret is unbounded and a finite probe value is reported.
NatureResponse nature_best_response(double gamma, double c, double sigma1, double sigma0,
                                    double gamma_tolerance = 1e-8);

// Supremum of regret over mean pairs with gap delta > 0 on one side
// (theta1: arm 1 best). At the Neyman fraction it is attained and equals
// delta * Phi(+-c - delta / (sigma1 + sigma0)); elsewhere nature can push the
// error probability to one on either side, so the supremum is delta itself.
double sup_regret_at_gap(double gamma, double c, double delta, NatureSide side, double sigma1,
                         double sigma0, double gamma_tolerance = 1e-8);

// Magnitude multiplier M of the probe: |best arm's mean| = M * gap.
inline constexpr double kProbeMagnitude = 10.0;

// Mean pair used at probe level k >= 1: gap k with the best arm's mean at
// -M*k (theta1: a = -Mk, b = a - k; theta0 mirrored on the other arm).
Environment probe_environment(NatureSide side, int level, double sigma1, double sigma0);

// Regret along the probe construction for levels 1..levels, on the branch
// where the deviation from Neyman hurts. Throws UsageError at the Neyman
// fraction, where the sequence stays bounded.
std::vector<double> divergence_probe(double gamma, double c, double sigma1, double sigma0,
                                     int levels);

// True if `values` is strictly increasing and its last entry exceeds `bound`.
bool certifies_unbounded(std::span<const double> values, double bound);

struct AgentResponse {
  std::vector<double> gammas;
  std::vector<double> bayes_regret;  // at c_opt, one per gamma
  double flatness = 0.0;             // max - min of bayes_regret
  double c_opt = 0.0;                // bayes_threshold_c(delta, m1)
  double c_grid_argmin = 0.0;        // c-grid minimizer of Bayes regret at gammas[0]
  std::vector<double> bayes_regret_mc;     // empty unless replications > 0
  std::vector<double> bayes_regret_mc_se;
};

struct AgentOptions {
  std::uint64_t replications = 0;  // >0 adds a Monte Carlo column
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

// Prior-weighted (Bayes) regret of each fixed fraction under an indifference
// prior, evaluated in closed form. Throws UsageError for other priors.
AgentResponse agent_best_response(const TwoPointPrior& prior, double sigma1, double sigma0,
                                  std::span<const double> gamma_grid,
                                  std::span<const double> c_grid,
                                  const AgentOptions& options = {});

// Bayes regret m1 R(gamma, c, state1) + (1 - m1) R(gamma, c, state0).
double bayes_regret(const TwoPointPrior& prior, double gamma, double c, double sigma1,
                    double sigma0);

struct EquilibriumSolution {
  double sigma1 = 0.0;
  double sigma0 = 0.0;
  double gamma_star = 0.0;
  double c_star = 0.0;
  double eta_star = 0.0;
  double delta_prior_star = 0.0;
  double v_star = 0.0;
  TwoPointPrior lfp;
  double exploitability = 0.0;
  double nature_gain = 0.0;  // best grid regret against (gamma*, c*) minus V*
  double agent_gain = 0.0;   // Bayes regret at (gamma*, c*) minus best grid deviation
  double tolerance = 0.0;
};

// Plays the game: bisects on the boundedness condition for gamma*, minimizes
// worst-case regret over c, reads eta*, V* off nature's best response, builds
// the least-favorable prior and measures exploitability on a fixed grid.
EquilibriumSolution solve_equilibrium(double sigma1, double sigma0, double tolerance = 1e-9);

}  // namespace bai
