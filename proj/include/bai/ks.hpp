#pragma once

#include <functional>
#include <span>

namespace bai::ks {

struct Result {
  double statistic = 0.0;  // sup-norm distance D
  double p_value = 1.0;
};

// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

// One-sample test of `sample` against a continuous CDF. The sample is
// sorted in place. p-values use Stephens' small-sample correction.
Result one_sample(std::span<double> sample, const std::function<double(double)>& cdf);

// Two-sample test; both samples are sorted in place.
Result two_sample(std::span<double> a, std::span<double> b);

}  // namespace bai::ks
