#include <cmath>

#include "kernel_tables.hpp"
#include "math_internal.hpp"

namespace bai::kernels {
namespace {

void normal_cdf_scalar(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = bai::detail::normal_cdf_unchecked(x[i]);
}

void euler_step_scalar(double* x1, double* x0, double* q1, double* q0,
                       const double* pi1, const double* z1, const double* z0,
                       std::size_t n, const StepCoefficients& k) {
  for (std::size_t i = 0; i < n; ++i) {
    const double t1 = pi1[i] * k.h;
    const double t0 = (1.0 - pi1[i]) * k.h;
    x1[i] = x1[i] + (k.mu1 * t1 + (k.sigma1 * std::sqrt(t1)) * z1[i]);
    x0[i] = x0[i] + (k.mu0 * t0 + (k.sigma0 * std::sqrt(t0)) * z0[i]);
    q1[i] = q1[i] + t1;
    q0[i] = q0[i] + t0;
  }
}

std::size_t count_arm1_scalar(const double* x1, const double* x0, std::size_t n,
                              double sigma1, double sigma0, double c) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (x1[i] / sigma1 - x0[i] / sigma0 >= c) ++count;
  }
  return count;
}

void accumulate_gaussian_scalar(const double* z, const std::uint8_t* arm,
                                std::size_t n, const GaussianArms& p,
                                ArmSums& acc) {
  for (std::size_t i = 0; i < n; ++i) {
    if (arm[i]) {
      const double y = p.mean1 + p.sd1 * z[i];
      acc.sum1 += y;
      acc.sumsq1 += y * y;
    } else {
      const double y = p.mean0 + p.sd0 * z[i];
      acc.sum0 += y;
      acc.sumsq0 += y * y;
    }
  }
}

void accumulate_bernoulli_scalar(const double* u, const std::uint8_t* arm,
                                 std::size_t n, const BernoulliArms& p,
                                 ArmSums& acc) {
  for (std::size_t i = 0; i < n; ++i) {
    if (arm[i]) {
      const double y = u[i] < p.p1 ? 0.5 : -0.5;
      acc.sum1 += y;
      acc.sumsq1 += 0.25;
    } else {
      const double y = u[i] < p.p0 ? 0.5 : -0.5;
      acc.sum0 += y;
      acc.sumsq0 += 0.25;
    }
  }
}

}  // namespace

namespace detail {
const KernelTable scalar_table = {
    Isa::scalar,          normal_cdf_scalar,          euler_step_scalar,
    count_arm1_scalar,    accumulate_gaussian_scalar, accumulate_bernoulli_scalar,
};
}  // namespace detail

}  // namespace bai::kernels
