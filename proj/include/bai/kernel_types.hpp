#pragma once

// Plain data types shared by every kernel variant. No standard-library
// templates here: vector translation units compiled for a wider ISA include
// this header and must not emit out-of-line template code.

#include <cstddef>
#include <cstdint>

namespace bai::kernels {

enum class Isa { scalar, avx2 };

// Per-step Euler coefficients shared by every lane of a block.
struct StepCoefficients {
  double mu1 = 0.0;
  double mu0 = 0.0;
  double sigma1 = 1.0;
  double sigma0 = 1.0;
  double h = 1.0;  // step length
};

// Arm-dependent affine map applied to standard variates: Y = mean + sd * z.
struct GaussianArms {
  double mean1 = 0.0, sd1 = 1.0;
  double mean0 = 0.0, sd0 = 1.0;
};

// Y = (u < p_a) - 1/2 for a uniform u, i.e. a centered Bernoulli(p_a) draw.
struct BernoulliArms {
  double p1 = 0.5;
  double p0 = 0.5;
};

// Running per-arm sums of outcomes and squared outcomes.
struct ArmSums {
  double sum1 = 0.0, sumsq1 = 0.0;
  double sum0 = 0.0, sumsq0 = 0.0;
};

struct KernelTable {
  Isa isa;
  // out[i] = Phi(x[i])
  void (*normal_cdf)(const double* x, double* out, std::size_t n);
  // One Euler-Maruyama step for n independent lanes; lane i samples arm 1 a
  // fraction pi1[i] of the step.
  void (*euler_step)(double* x1, double* x0, double* q1, double* q0,
                     const double* pi1, const double* z1, const double* z0,
                     std::size_t n, const StepCoefficients& k);
  // Number of lanes with x1/sigma1 - x0/sigma0 >= c.
  std::size_t (*count_arm1)(const double* x1, const double* x0, std::size_t n,
                            double sigma1, double sigma0, double c);
  // Adds outcomes of periods [0, n) to acc; arm[i] is 1 or 0.
  void (*accumulate_gaussian)(const double* z, const std::uint8_t* arm,
                              std::size_t n, const GaussianArms& p,
                              ArmSums& acc);
  void (*accumulate_bernoulli)(const double* u, const std::uint8_t* arm,
                               std::size_t n, const BernoulliArms& p,
                               ArmSums& acc);
};

}  // namespace bai::kernels
