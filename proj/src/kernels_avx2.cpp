// AVX2 variants of the kernel table. Compiled with -mavx2 and selected at
// runtime only when the CPU reports AVX2 support.

#include <immintrin.h>

#include "cody_erfc.hpp"
#include "kernel_tables.hpp"

namespace bai::kernels {
namespace {

constexpr std::size_t kLanes = 4;

inline __m256d splat(double v) { return _mm256_set1_pd(v); }

// exp(x) for x in [-708, 0]: Cody-Waite reduction by ln 2, then a degree-13
// Taylor polynomial on |r| <= ln2/2 (truncation error below 5e-18 relative).
inline __m256d exp_nonpositive(__m256d x) {
  x = _mm256_max_pd(x, splat(-708.0));
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, splat(1.4426950408889634074)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_sub_pd(x, _mm256_mul_pd(n, splat(0.693145751953125)));
  r = _mm256_sub_pd(r, _mm256_mul_pd(n, splat(1.42860682030941723212e-6)));

  // 1/k! for k = 13 .. 0
  constexpr double kInvFact[14] = {
      1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0,
      1.0 / 362880.0,     1.0 / 40320.0,     1.0 / 5040.0,     1.0 / 720.0,
      1.0 / 120.0,        1.0 / 24.0,        1.0 / 6.0,        0.5,
      1.0,                1.0};
  __m256d p = splat(kInvFact[0]);
  for (int i = 1; i < 14; ++i) p = _mm256_add_pd(_mm256_mul_pd(p, r), splat(kInvFact[i]));

  // 2^n assembled in the exponent field; n >= -1021 after the clamp.
  const __m256d magic = splat(6755399441055744.0);  // 2^52 + 2^51
  const __m256i ni = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(n, magic)),
                                      _mm256_castpd_si256(magic));
  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(ni, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
}

inline __m256d normal_cdf_lanes(__m256d x) {
  using namespace cody;
  const __m256d sign = splat(-0.0);
  const __m256d one = splat(1.0);
  const __m256d t = _mm256_mul_pd(_mm256_xor_pd(x, sign), splat(kInvSqrt2));
  const __m256d y = _mm256_andnot_pd(sign, t);

  // |y| <= 0.46875
  const __m256d ysq = _mm256_mul_pd(y, y);
  __m256d num = _mm256_mul_pd(splat(kA[4]), ysq);
  __m256d den = ysq;
  for (int i = 0; i < 3; ++i) {
    num = _mm256_mul_pd(_mm256_add_pd(num, splat(kA[i])), ysq);
    den = _mm256_mul_pd(_mm256_add_pd(den, splat(kB[i])), ysq);
  }
  const __m256d small = _mm256_sub_pd(
      one, _mm256_div_pd(_mm256_mul_pd(t, _mm256_add_pd(num, splat(kA[3]))),
                         _mm256_add_pd(den, splat(kB[3]))));

  // 0.46875 < y <= 4
  num = _mm256_mul_pd(splat(kC[8]), y);
  den = y;
  for (int i = 0; i < 7; ++i) {
    num = _mm256_mul_pd(_mm256_add_pd(num, splat(kC[i])), y);
    den = _mm256_mul_pd(_mm256_add_pd(den, splat(kD[i])), y);
  }
  const __m256d mid = _mm256_div_pd(_mm256_add_pd(num, splat(kC[7])),
                                    _mm256_add_pd(den, splat(kD[7])));

  // y > 4; evaluated at max(y, 4) so masked lanes stay finite
  const __m256d yt = _mm256_max_pd(y, splat(kThreshMid));
  const __m256d inv_sq = _mm256_div_pd(one, _mm256_mul_pd(yt, yt));
  num = _mm256_mul_pd(splat(kP[5]), inv_sq);
  den = inv_sq;
  for (int i = 0; i < 4; ++i) {
    num = _mm256_mul_pd(_mm256_add_pd(num, splat(kP[i])), inv_sq);
    den = _mm256_mul_pd(_mm256_add_pd(den, splat(kQ[i])), inv_sq);
  }
  __m256d tail = _mm256_div_pd(_mm256_mul_pd(inv_sq, _mm256_add_pd(num, splat(kP[4]))),
                               _mm256_add_pd(den, splat(kQ[4])));
  tail = _mm256_div_pd(_mm256_sub_pd(splat(kSqrtPiInv), tail), yt);

  const __m256d is_mid = _mm256_cmp_pd(y, splat(kThreshMid), _CMP_LE_OQ);
  __m256d res = _mm256_blendv_pd(tail, mid, is_mid);
  const __m256d y16 = _mm256_div_pd(
      _mm256_round_pd(_mm256_mul_pd(y, splat(16.0)), _MM_FROUND_TO_ZERO | _MM_FROUND_NO_EXC),
      splat(16.0));
  const __m256d del = _mm256_mul_pd(_mm256_sub_pd(y, y16), _mm256_add_pd(y, y16));
  const __m256d factor =
      _mm256_mul_pd(exp_nonpositive(_mm256_xor_pd(_mm256_mul_pd(y16, y16), sign)),
                    exp_nonpositive(_mm256_xor_pd(del, sign)));
  res = _mm256_mul_pd(res, factor);
  const __m256d huge = _mm256_cmp_pd(y, splat(kXBig), _CMP_GE_OQ);
  res = _mm256_andnot_pd(huge, res);
  const __m256d negative = _mm256_cmp_pd(t, _mm256_setzero_pd(), _CMP_LT_OQ);
  res = _mm256_blendv_pd(res, _mm256_sub_pd(splat(2.0), res), negative);

  const __m256d is_small = _mm256_cmp_pd(y, splat(kThreshSmall), _CMP_LE_OQ);
  res = _mm256_blendv_pd(res, small, is_small);
  return _mm256_mul_pd(splat(0.5), res);
}

void normal_cdf_avx2(const double* x, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(out + i, normal_cdf_lanes(_mm256_loadu_pd(x + i)));
  }
  if (i < n) {
    double in[kLanes] = {0.0, 0.0, 0.0, 0.0};
    double res[kLanes];
    for (std::size_t j = i; j < n; ++j) in[j - i] = x[j];
    _mm256_storeu_pd(res, normal_cdf_lanes(_mm256_loadu_pd(in)));
    for (std::size_t j = i; j < n; ++j) out[j] = res[j - i];
  }
}

void euler_step_avx2(double* x1, double* x0, double* q1, double* q0,
                     const double* pi1, const double* z1, const double* z0,
                     std::size_t n, const StepCoefficients& k) {
  const __m256d h = splat(k.h);
  const __m256d one = splat(1.0);
  const __m256d mu1 = splat(k.mu1), mu0 = splat(k.mu0);
  const __m256d s1 = splat(k.sigma1), s0 = splat(k.sigma0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d p1 = _mm256_loadu_pd(pi1 + i);
    const __m256d t1 = _mm256_mul_pd(p1, h);
    const __m256d t0 = _mm256_mul_pd(_mm256_sub_pd(one, p1), h);
    const __m256d d1 = _mm256_add_pd(
        _mm256_mul_pd(mu1, t1),
        _mm256_mul_pd(_mm256_mul_pd(s1, _mm256_sqrt_pd(t1)), _mm256_loadu_pd(z1 + i)));
    const __m256d d0 = _mm256_add_pd(
        _mm256_mul_pd(mu0, t0),
        _mm256_mul_pd(_mm256_mul_pd(s0, _mm256_sqrt_pd(t0)), _mm256_loadu_pd(z0 + i)));
    _mm256_storeu_pd(x1 + i, _mm256_add_pd(_mm256_loadu_pd(x1 + i), d1));
    _mm256_storeu_pd(x0 + i, _mm256_add_pd(_mm256_loadu_pd(x0 + i), d0));
    _mm256_storeu_pd(q1 + i, _mm256_add_pd(_mm256_loadu_pd(q1 + i), t1));
    _mm256_storeu_pd(q0 + i, _mm256_add_pd(_mm256_loadu_pd(q0 + i), t0));
  }
  if (i < n) {
    detail::scalar_table.euler_step(x1 + i, x0 + i, q1 + i, q0 + i, pi1 + i, z1 + i,
                                    z0 + i, n - i, k);
  }
}

std::size_t count_arm1_avx2(const double* x1, const double* x0, std::size_t n,
                            double sigma1, double sigma0, double c) {
  const __m256d s1 = splat(sigma1), s0 = splat(sigma0), cc = splat(c);
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d d = _mm256_sub_pd(_mm256_div_pd(_mm256_loadu_pd(x1 + i), s1),
                                    _mm256_div_pd(_mm256_loadu_pd(x0 + i), s0));
    const int mask = _mm256_movemask_pd(_mm256_cmp_pd(d, cc, _CMP_GE_OQ));
    count += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(mask)));
  }
  if (i < n) count += detail::scalar_table.count_arm1(x1 + i, x0 + i, n - i, sigma1, sigma0, c);
  return count;
}

inline __m256d arm_mask(const std::uint8_t* arm) {
  int packed;
  __builtin_memcpy(&packed, arm, sizeof(packed));
  const __m256i wide = _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(packed));
  return _mm256_castsi256_pd(_mm256_cmpgt_epi64(wide, _mm256_setzero_si256()));
}

inline double horizontal_sum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

void accumulate_gaussian_avx2(const double* z, const std::uint8_t* arm,
                              std::size_t n, const GaussianArms& p, ArmSums& acc) {
  const __m256d mean1 = splat(p.mean1), mean0 = splat(p.mean0);
  const __m256d sd1 = splat(p.sd1), sd0 = splat(p.sd0);
  __m256d sum1 = _mm256_setzero_pd(), sum0 = _mm256_setzero_pd();
  __m256d sq1 = _mm256_setzero_pd(), sq0 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d m = arm_mask(arm + i);
    const __m256d y = _mm256_add_pd(_mm256_blendv_pd(mean0, mean1, m),
                                    _mm256_mul_pd(_mm256_blendv_pd(sd0, sd1, m),
                                                  _mm256_loadu_pd(z + i)));
    const __m256d y1 = _mm256_and_pd(m, y);
    const __m256d y0 = _mm256_andnot_pd(m, y);
    sum1 = _mm256_add_pd(sum1, y1);
    sum0 = _mm256_add_pd(sum0, y0);
    sq1 = _mm256_add_pd(sq1, _mm256_mul_pd(y1, y1));
    sq0 = _mm256_add_pd(sq0, _mm256_mul_pd(y0, y0));
  }
  acc.sum1 += horizontal_sum(sum1);
  acc.sum0 += horizontal_sum(sum0);
  acc.sumsq1 += horizontal_sum(sq1);
  acc.sumsq0 += horizontal_sum(sq0);
  if (i < n) detail::scalar_table.accumulate_gaussian(z + i, arm + i, n - i, p, acc);
}

void accumulate_bernoulli_avx2(const double* u, const std::uint8_t* arm,
                               std::size_t n, const BernoulliArms& p, ArmSums& acc) {
  const __m256d p1 = splat(p.p1), p0 = splat(p.p0);
  const __m256d half = splat(0.5), quarter = splat(0.25);
  __m256d sum1 = _mm256_setzero_pd(), sum0 = _mm256_setzero_pd();
  __m256d sq1 = _mm256_setzero_pd(), sq0 = _mm256_setzero_pd();
  const __m256d sign = splat(-0.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d m = arm_mask(arm + i);
    const __m256d hit =
        _mm256_cmp_pd(_mm256_loadu_pd(u + i), _mm256_blendv_pd(p0, p1, m), _CMP_LT_OQ);
    // +0.5 on success, -0.5 otherwise
    const __m256d y = _mm256_or_pd(half, _mm256_andnot_pd(hit, sign));
    sum1 = _mm256_add_pd(sum1, _mm256_and_pd(m, y));
    sum0 = _mm256_add_pd(sum0, _mm256_andnot_pd(m, y));
    sq1 = _mm256_add_pd(sq1, _mm256_and_pd(m, quarter));
    sq0 = _mm256_add_pd(sq0, _mm256_andnot_pd(m, quarter));
  }
  acc.sum1 += horizontal_sum(sum1);
  acc.sum0 += horizontal_sum(sum0);
  acc.sumsq1 += horizontal_sum(sq1);
  acc.sumsq0 += horizontal_sum(sq0);
  if (i < n) detail::scalar_table.accumulate_bernoulli(u + i, arm + i, n - i, p, acc);
}

}  // namespace

namespace detail {
const KernelTable avx2_table = {
    Isa::avx2,          normal_cdf_avx2,          euler_step_avx2,
    count_arm1_avx2,    accumulate_gaussian_avx2, accumulate_bernoulli_avx2,
};
}  // namespace detail

}  // namespace bai::kernels
