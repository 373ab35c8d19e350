#pragma once

// Reference computations for tests. Nothing here calls into the library:
// the normal CDF comes from 50-digit Boost.Multiprecision, the equilibrium
// constant from a brute-force grid over libm erfc.

#include <cmath>
#include <cstdint>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using Big = boost::multiprecision::cpp_bin_float_50;

inline double normal_cdf(double x) {
  const Big z = Big(x) / boost::multiprecision::sqrt(Big(2));
  const Big v = boost::math::erfc(-z) / 2;
  return v.convert_to<double>();
}

inline double normal_cdf_libm(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

struct GridMax {
  double delta = 0.0;
  double value = 0.0;
};

// max of d * Phi(-d) over d = i * step in [lo, hi].
inline GridMax gap_objective_grid(double lo, double hi, double step) {
  GridMax best{lo, lo * normal_cdf_libm(-lo)};
  const auto count = static_cast<std::int64_t>(std::llround((hi - lo) / step));
  for (std::int64_t i = 0; i <= count; ++i) {
    const double d = lo + static_cast<double>(i) * step;
    const double v = d * normal_cdf_libm(-d);
    if (v > best.value) best = {d, v};
  }
  return best;
}

// Grid maximizer refined by bisection on the derivative Phi(-d) - d phi(d)
// inside the neighbouring grid cells.
inline GridMax delta_star() {
  constexpr double step = 1e-6;
  const GridMax g = gap_objective_grid(0.0, 3.0, step);
  auto slope = [](double d) {
    return normal_cdf_libm(-d) - d * std::exp(-0.5 * d * d) / std::sqrt(2.0 * std::numbers::pi);
  };
  double lo = g.delta - step, hi = g.delta + step;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid) > 0.0 ? lo : hi) = mid;
  }
  const double d = 0.5 * (lo + hi);
  return {d, d * normal_cdf_libm(-d)};
}

// Frozen values of the oracles above (50-digit arithmetic, rounded to
// double); regenerating them from the functions is itself a test.
inline constexpr double kDeltaStar = 0.7517915246935645;
inline constexpr double kGapObjectiveMax = 0.16997120747990366;
inline constexpr double kVStar11 = 0.33994241495980732;
inline constexpr double kVStar21 = 0.50991362243971099;
inline constexpr double kVStar15 = 1.0198272448794220;
inline constexpr double kEtaStar11 = 1.5035830493871289;

}  // namespace oracle
