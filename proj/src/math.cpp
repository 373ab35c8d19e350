#include "bai/math.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bai/errors.hpp"
#include "cody_erfc.hpp"
#include "math_internal.hpp"

namespace bai {
namespace {

// erfc(t) via Cody's three-interval rational approximations. The
// exp(-y^2) factor is split as exp(-ysq^2) * exp(-(y-ysq)(y+ysq)) with ysq
// truncated to a multiple of 1/16 so that y^2 is never formed inexactly.
double erfc_cody(double t) {
  using namespace cody;
  const double y = std::fabs(t);
  double result;
  if (y <= kThreshSmall) {
    const double ysq = y * y;
    double num = kA[4] * ysq;
    double den = ysq;
    for (int i = 0; i < 3; ++i) {
      num = (num + kA[i]) * ysq;
      den = (den + kB[i]) * ysq;
    }
    return 1.0 - t * (num + kA[3]) / (den + kB[3]);
  }
  if (y >= kXBig) {
    result = 0.0;
  } else {
    if (y <= kThreshMid) {
      double num = kC[8] * y;
      double den = y;
      for (int i = 0; i < 7; ++i) {
        num = (num + kC[i]) * y;
        den = (den + kD[i]) * y;
      }
      result = (num + kC[7]) / (den + kD[7]);
    } else {
      const double inv_sq = 1.0 / (y * y);
      double num = kP[5] * inv_sq;
      double den = inv_sq;
      for (int i = 0; i < 4; ++i) {
        num = (num + kP[i]) * inv_sq;
        den = (den + kQ[i]) * inv_sq;
      }
      result = inv_sq * (num + kP[4]) / (den + kQ[4]);
      result = (kSqrtPiInv - result) / y;
    }
    const double ysq = std::trunc(y * 16.0) / 16.0;
    const double del = (y - ysq) * (y + ysq);
    result *= std::exp(-ysq * ysq) * std::exp(-del);
  }
  return t < 0.0 ? 2.0 - result : result;
}

// d/d(delta) of delta * Phi(-delta).
double gap_objective_slope(double delta) {
  return std_normal_cdf(-delta) - delta * std_normal_pdf(delta);
}

void require_positive_sigma(double sigma1, double sigma0) {
  if (!(sigma1 > 0.0) || !(sigma0 > 0.0) || !std::isfinite(sigma1) ||
      !std::isfinite(sigma0)) {
    throw DomainError("sigma values must be positive and finite (got " +
                      std::to_string(sigma1) + ", " + std::to_string(sigma0) +
                      ")");
  }
}

}  // namespace

namespace detail {
double normal_cdf_unchecked(double x) {
  return 0.5 * erfc_cody(-x * cody::kInvSqrt2);
}
}  // namespace detail

double std_normal_cdf(double x) {
  if (!std::isfinite(x)) {
    throw DomainError("std_normal_cdf: non-finite argument");
  }
  return detail::normal_cdf_unchecked(x);
}

double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

double gap_objective(double delta) { return delta * std_normal_cdf(-delta); }

DeltaStar solve_delta_star(double tolerance) {
  if (!(tolerance > 0.0)) {
    throw DomainError("solve_delta_star: tolerance must be positive");
  }
  // The slope is positive at 0 and negative on (1, 5]; g(5) < 1.5e-6.
  double lo = 0.0;
  double hi = 5.0;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (gap_objective_slope(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double d = 0.5 * (lo + hi);
  return {d, gap_objective(d)};
}

EquilibriumConstants EquilibriumConstants::compute(double sigma1, double sigma0,
                                                   double tolerance) {
  require_positive_sigma(sigma1, sigma0);
  const DeltaStar ds = solve_delta_star(tolerance);
  const double scale = sigma1 + sigma0;
  EquilibriumConstants k;
  k.delta_star = ds.delta_star;
  k.objective_value = ds.objective_value;
  k.delta_prior = 2.0 * ds.delta_star;
  k.eta_star = scale * ds.delta_star;
  k.v_star = scale * ds.objective_value;
  k.sigma1 = sigma1;
  k.sigma0 = sigma0;
  return k;
}

double v_star(double sigma1, double sigma0) {
  return EquilibriumConstants::compute(sigma1, sigma0).v_star;
}

}  // namespace bai
