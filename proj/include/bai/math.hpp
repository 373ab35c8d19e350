#pragma once

namespace bai {

// Standard normal CDF. Accurate to ~1e-16 absolute; throws DomainError on
// non-finite input.
double std_normal_cdf(double x);

double std_normal_pdf(double x);

// g(delta) = delta * Phi(-delta), the standardized worst-case regret curve.
double gap_objective(double delta);

struct DeltaStar {
  double delta_star = 0.0;
  double objective_value = 0.0;
};

// Maximizer of delta * Phi(-delta) over delta > 0, found by bisection on the
// sign of the derivative Phi(-d) - d*phi(d) over the bracket [0, 5].
DeltaStar solve_delta_star(double tolerance = 1e-12);

struct EquilibriumConstants {
  double delta_star = 0.0;
  double objective_value = 0.0;
  double delta_prior = 0.0;  // 2 * delta_star
  double eta_star = 0.0;     // (sigma1 + sigma0) * delta_star
  double v_star = 0.0;       // (sigma1 + sigma0) * objective_value
  double sigma1 = 0.0;
  double sigma0 = 0.0;

  static EquilibriumConstants compute(double sigma1, double sigma0,
                                      double tolerance = 1e-12);
};

// Minimax regret value (sigma1 + sigma0) * max_d d * Phi(-d).
double v_star(double sigma1, double sigma0);

}  // namespace bai
