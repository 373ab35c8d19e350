#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "bai/diffusion.hpp"
#include "bai/errors.hpp"
#include "bai/ks.hpp"
#include "bai/rng.hpp"
#include "oracles.hpp"

using bai::Environment;
using bai::ExperimentState;

namespace {

struct Stats {
  double mean = 0.0, var = 0.0, se = 0.0;
};

Stats stats(const std::vector<double>& v) {
  Stats s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  for (double x : v) s.var += (x - s.mean) * (x - s.mean);
  s.var /= static_cast<double>(v.size() - 1);
  s.se = std::sqrt(s.var / static_cast<double>(v.size()));
  return s;
}

std::vector<double> exact_x1(const Environment& env, double gamma, int reps, std::uint64_t master) {
  std::vector<double> out(reps);
  for (int i = 0; i < reps; ++i) out[i] = bai::exact_terminal_sample(env, gamma, bai::derive_seed(master, i)).x1;
  return out;
}

}  // namespace

TEST_CASE("exact sampler: zero drift") {
  const auto s = stats(exact_x1({0, 0, 1, 1}, 0.5, 100000, 1));
  CHECK(std::fabs(s.mean) < 3.0 * s.se);
}

TEST_CASE("exact sampler: mean and variance of x1") {
  const std::vector<double> x = exact_x1({1, 0, 1, 1}, 0.5, 100000, 2);
  const auto s = stats(x);
  CHECK(std::fabs(s.mean - 0.5) < 3.0 * s.se);
  // SE of the sample variance of a normal: var * sqrt(2/(n-1))
  CHECK(std::fabs(s.var - 0.5) < 3.0 * 0.5 * std::sqrt(2.0 / (x.size() - 1)));
}

TEST_CASE("exact sampler: edge fractions") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = bai::exact_terminal_sample({0.3, -0.2, 1.5, 0.5}, 0.0, seed);
    CHECK(s.x1 == 0.0);
    CHECK(s.q1 == 0.0);
    CHECK(s.q0 == 1.0);
  }
  const auto s = stats(exact_x1({2, 0, 1, 1}, 1.0, 100000, 3));
  CHECK(std::fabs(s.mean - 2.0) < 3.0 * s.se);
  CHECK_THROWS_AS(bai::exact_terminal_sample({0, 0, 1, 1}, 1.5, 0), bai::DomainError);
  CHECK_THROWS_AS(bai::exact_terminal_sample({0, 0, 1, 1}, bai::SamplingRule{bai::TwoStage{}}, 0),
                  bai::UsageError);
}

TEST_CASE("Euler path matches the exact terminal law") {
  const Environment env{0.4, -0.3, 1.3, 0.8};
  const auto policy = bai::fixed_fraction_policy(0.35);
  std::vector<double> exact = exact_x1(env, 0.35, 10000, 4);
  std::vector<double> euler(10000);
  for (int i = 0; i < 10000; ++i)
    euler[i] = bai::simulate_path(env, policy, {1000, bai::derive_seed(5, i)}).x1;
  CHECK(bai::ks::two_sample(exact, euler).p_value > 0.01);
}

TEST_CASE("fixed fraction accrues q1 = gamma") {
  for (double gamma : {0.0, 0.2, 0.5, 2.0 / 3.0, 1.0}) {
    const auto s = bai::simulate_path({1, 0, 1, 1}, bai::fixed_fraction_policy(gamma), {1000, 9});
    CHECK(std::fabs(s.q1 - gamma) <= 1e-9);
    CHECK(std::fabs(s.t - 1.0) <= 1e-9);
  }
}

TEST_CASE("q1 + q0 = 1 on every path and rule") {
  const bai::PolicySpec policies[] = {bai::fixed_fraction_policy(0.3), {bai::EqualSplit{}, 0},
                                      {bai::TwoStage{0.5}, 0}, {bai::AdaptivePlugIn{10}, 0},
                                      {bai::AdaptivePlugIn{1}, 0}};
  const Environment env{0.5, -0.5, 2.0, 0.5};
  std::vector<std::uint64_t> seeds(200);
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = bai::derive_seed(10, i);
  for (const auto& p : policies) {
    for (const auto& s : bai::simulate_paths(env, p, 500, seeds)) {
      CHECK(std::fabs(s.q1 + s.q0 - 1.0) <= 1e-9);
      CHECK(s.q1 >= 0.0);
      CHECK(s.q0 >= 0.0);
    }
  }
}

TEST_CASE("adaptive rules steer toward the Neyman fraction") {
  const Environment env{0, 0, 3.0, 1.0};
  std::vector<std::uint64_t> seeds(50);
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = bai::derive_seed(11, i);
  for (const bai::PolicySpec& p : {bai::PolicySpec{bai::AdaptivePlugIn{20}, 0}, bai::PolicySpec{bai::TwoStage{0.5}, 0}}) {
    double q1 = 0;
    for (const auto& s : bai::simulate_paths(env, p, 2000, seeds)) q1 += s.q1;
    CHECK(std::fabs(q1 / seeds.size() - 0.75) < 0.02);
  }
}

TEST_CASE("batched paths are bit-identical to single paths, on every kernel table") {
  const Environment env{0.2, 0.1, 1.0, 2.0};
  std::vector<std::uint64_t> seeds(37);
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = bai::derive_seed(12, i);
  for (const bai::PolicySpec& p :
       {bai::fixed_fraction_policy(0.6), bai::PolicySpec{bai::AdaptivePlugIn{7}, 0}, bai::PolicySpec{bai::TwoStage{0.4}, 0}}) {
    const auto batch = bai::simulate_paths(env, p, 300, seeds);
    for (auto isa : {bai::kernels::Isa::scalar, bai::kernels::Isa::avx2}) {
      if (!bai::kernels::supported(isa)) continue;
      const auto other = bai::simulate_paths(env, p, 300, seeds, bai::kernels::table(isa));
      for (std::size_t i = 0; i < seeds.size(); ++i) {
        CHECK(std::memcmp(&batch[i], &other[i], sizeof(ExperimentState)) == 0);
      }
    }
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      const auto single = bai::simulate_path(env, p, {300, seeds[i]});
      CHECK(single.x1 == batch[i].x1);
      CHECK(single.x0 == batch[i].x0);
      CHECK(single.q1 == batch[i].q1);
    }
  }
}

TEST_CASE("log_likelihood_ratio") {
  const auto prior = bai::TwoPointPrior::make({1, -1}, {-1, 1}, 0.5);
  CHECK(bai::log_likelihood_ratio({1, 0.5, -0.5, 0.5, 0.5}, prior, 1, 1) == doctest::Approx(2.0));

  const bai::TwoPointPrior same{{0.3, -0.1}, {0.3, -0.1}, 0.5};
  bai::Rng rng(13);
  for (int i = 0; i < 100; ++i) {
    const ExperimentState s{1, rng.normal(), rng.normal(), rng.uniform(), rng.uniform()};
    CHECK(bai::log_likelihood_ratio(s, same, 1.3, 0.4) == 0.0);
  }

  for (int i = 0; i < 500; ++i) {
    const double s1 = 0.2 + 3 * rng.uniform(), s0 = 0.2 + 3 * rng.uniform(), d = 0.1 + 3 * rng.uniform();
    const auto ind = bai::TwoPointPrior::indifference(s1, s0, d);
    const double q1 = rng.uniform();
    const ExperimentState s{1, rng.normal(), rng.normal(), q1, 1 - q1};
    CHECK(bai::log_likelihood_ratio(s, ind, s1, s0) ==
          doctest::Approx(d * (s.x1 / s1 - s.x0 / s0)).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("log phi is Normal(-Delta^2/2, Delta^2) under theta = 0") {
  const double big_delta = 1.5035830493871289;
  const auto prior = bai::TwoPointPrior::indifference(1, 1, big_delta);
  const auto env = prior.environment(false, 1, 1);
  std::vector<std::uint64_t> seeds(10000);
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = bai::derive_seed(14, i);
  std::vector<double> lp;
  for (const auto& s : bai::simulate_paths(env, bai::fixed_fraction_policy(0.3), 200, seeds))
    lp.push_back(bai::log_likelihood_ratio(s, prior, 1, 1));
  const double m = -0.5 * big_delta * big_delta;
  const auto r = bai::ks::one_sample(lp, [&](double x) { return oracle::normal_cdf_libm((x - m) / big_delta); });
  CHECK(r.p_value > 0.01);
}

TEST_CASE("posterior_belief") {
  CHECK(bai::posterior_belief(0.0, 0.5) == 0.5);
  CHECK(bai::posterior_belief(std::log(3.0), 0.5) == doctest::Approx(0.75).epsilon(1e-15));
  const double hi = bai::posterior_belief(50.0, 0.5);
  CHECK(hi >= 1.0 - 1e-20);
  CHECK(hi <= 1.0);
  CHECK(bai::posterior_belief(-800.0, 0.5) >= 0.0);
  CHECK(bai::posterior_belief(800.0, 0.5) == 1.0);
  CHECK_THROWS_AS(bai::posterior_belief(0.0, 1.0), bai::DomainError);
}

TEST_CASE("posterior_belief is increasing in log phi and in m1") {
  double prev = 0.0;
  for (double lp = -30.0; lp <= 30.0; lp += 0.25) {
    const double b = bai::posterior_belief(lp, 0.3);
    CHECK(b > prev);
    prev = b;
  }
  for (double lp : {-5.0, 0.0, 2.0}) {
    prev = 0.0;
    for (double m = 0.05; m < 1.0; m += 0.05) {
      const double b = bai::posterior_belief(lp, m);
      CHECK(b > prev);
      prev = b;
    }
  }
}

TEST_CASE("environment validation") {
  CHECK_THROWS_AS(bai::validate(Environment{0, 0, 0, 1}), bai::DomainError);
  CHECK_THROWS_AS(bai::validate(Environment{NAN, 0, 1, 1}), bai::DomainError);
  CHECK_THROWS_AS(bai::simulate_path({0, 0, 1, 1}, bai::fixed_fraction_policy(0.5), {0, 1}), bai::DomainError);
}
