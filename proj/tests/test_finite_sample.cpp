#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "bai/errors.hpp"
#include "bai/finite_sample.hpp"
#include "bai/game.hpp"
#include "bai/math.hpp"
#include "bai/rng.hpp"
#include "oracles.hpp"

using bai::Family;
using bai::LocalEnvironment;

namespace {

bai::RegretEstimate trial(const LocalEnvironment& env, std::uint64_t n, const bai::PolicySpec& p,
                          std::uint64_t reps, std::uint64_t seed, unsigned threads = 0) {
  return bai::run_trial(env, {n, p, reps, seed, threads});
}

}  // namespace

TEST_CASE("zero gap gives zero scaled regret") {
  const auto e = trial(LocalEnvironment::at_gap(Family::gaussian, 0.0), 100, {bai::TwoStage{0.5}, 0}, 500, 1);
  CHECK(e.mean == 0.0);
  CHECK(e.std_error == 0.0);
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(bai::validate(LocalEnvironment::at_gap(Family::gaussian, 1.0), 1), bai::DomainError);
  CHECK_THROWS_AS(bai::validate(LocalEnvironment{Family::gaussian, 0, 0, 0, 1}, 10), bai::DomainError);
  // p = 1/2 + h/sqrt(n) must stay in [0, 1]
  CHECK_NOTHROW(bai::validate(LocalEnvironment{Family::bernoulli, 5, -5, 1, 1}, 100));
  CHECK_THROWS_AS(bai::validate(LocalEnvironment{Family::bernoulli, 5.1, 0, 1, 1}, 100), bai::DomainError);
  CHECK_THROWS_AS(trial(LocalEnvironment::at_gap(Family::gaussian, 1.0), 10, {bai::TwoStage{0.5}, 0}, 100, 1),
                  bai::UsageError);
  CHECK(bai::parse_family("bernoulli") == Family::bernoulli);
  CHECK_THROWS_AS(bai::parse_family("poisson"), bai::UsageError);
}

TEST_CASE("deterministic rounding realizes the fixed fraction") {
  const auto env = LocalEnvironment::at_gap(Family::gaussian, 1.0);
  for (double g : {0.0, 0.25, 1.0 / 3.0, 0.5, 0.9, 1.0}) {
    for (std::uint64_t n : {2u, 7u, 100u, 1001u}) {
      const auto r = bai::simulate_replication(env, n, bai::fixed_fraction_policy(g), 3);
      CHECK(r.n1 + r.n0 == n);
      CHECK(std::fabs(static_cast<double>(r.n1) - g * static_cast<double>(n)) <= 1.0);
    }
  }
}

TEST_CASE("outcome scaling leaves every decision unchanged") {
  const bai::PolicySpec policies[] = {bai::fixed_fraction_policy(0.4, 0.2), bai::neyman_policy(2, 1),
                                      {bai::EqualSplit{}, -0.1}, {bai::TwoStage{0.5}, 0},
                                      {bai::AdaptivePlugIn{25}, 0}};
  for (const auto& p : policies) {
    for (std::uint64_t seed = 0; seed < 150; ++seed) {
      const LocalEnvironment base{Family::gaussian, 0.4, -0.2, 2.0, 1.0};
      const auto a = bai::simulate_replication(base, 400, p, seed);
      for (double k : {0.5, 2.0, 3.7}) {
        const LocalEnvironment scaled{Family::gaussian, k * 0.4, -k * 0.2, k * 2.0, k * 1.0};
        const auto b = bai::simulate_replication(scaled, 400, p, seed);
        CHECK(a.decision == b.decision);
        CHECK(a.n1 == b.n1);
      }
    }
  }
}

TEST_CASE("two-stage falls back to equal split when the pilot is constant") {
  // p1 = p0 = 1: every outcome is +1/2, so both pilot deviations are zero
  const double root_n = 20.0;
  const LocalEnvironment env{Family::bernoulli, root_n / 2, root_n / 2, 1, 1};
  const auto r = bai::simulate_replication(env, 400, {bai::TwoStage{0.5}, 0}, 5);
  CHECK(r.n1 == 200);
  CHECK(r.sigma1_used == 1.0);
  CHECK(r.sigma0_used == 1.0);
  CHECK(r.decision == bai::Arm::arm1);
  CHECK_NOTHROW(trial(env, 400, {bai::AdaptivePlugIn{10}, 0}, 50, 6));
}

TEST_CASE("two-stage allocates near Neyman after the pilot") {
  const LocalEnvironment env{Family::gaussian, 0, 0, 3.0, 1.0};
  double share = 0;
  for (std::uint64_t s = 0; s < 20; ++s)
    share += static_cast<double>(bai::simulate_replication(env, 10000, {bai::TwoStage{0.5}, 0}, s).n1) / 10000.0;
  CHECK(std::fabs(share / 20 - 0.75) < 0.01);
}

TEST_CASE("sample standard deviations") {
  const std::vector<double> constant(50, 3.25);
  CHECK(bai::sample_sd(constant) == 0.0);
  CHECK(bai::sample_sd(std::vector<double>{1.0}) == 0.0);
  CHECK(bai::sample_sd(std::vector<double>{1.0, 3.0}) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(bai::estimate_sigmas({}, constant), bai::UsageError);

  bai::Rng rng(7);
  int inside = 0;
  for (int t = 0; t < 200; ++t) {
    std::vector<double> z(10000);
    rng.fill_normal(z);
    const double s = bai::sample_sd(z);
    inside += (s >= 0.97 && s <= 1.03);
  }
  CHECK(inside == 200);

  std::vector<double> coin(10000);
  for (auto& c : coin) c = rng.uniform() < 0.5 ? 0.5 : -0.5;
  const auto est = bai::estimate_sigmas(coin, std::vector<double>{0.0, 1.0});
  CHECK(std::fabs(est.sigma1 - 0.5) <= 0.02);
  CHECK(est.sigma0 == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("results do not depend on the thread count") {
  const LocalEnvironment env{Family::gaussian, 0.6, -0.6, 1.5, 1.0};
  for (const bai::PolicySpec& p : {bai::neyman_policy(1.5, 1.0), bai::PolicySpec{bai::AdaptivePlugIn{20}, 0}}) {
    const auto a = trial(env, 300, p, 700, 8, 1);
    const auto b = trial(env, 300, p, 700, 8, 3);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
  }
}

TEST_CASE("kernel tables give the same decisions") {
  if (!bai::kernels::supported(bai::kernels::Isa::avx2)) return;
  const auto& s = bai::kernels::table(bai::kernels::Isa::scalar);
  const auto& v = bai::kernels::table(bai::kernels::Isa::avx2);
  int differ = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    for (Family f : {Family::gaussian, Family::bernoulli}) {
      const LocalEnvironment env{f, 0.3, -0.3, 1.0, 1.0};
      const auto a = bai::simulate_replication(env, 1000, {bai::AdaptivePlugIn{50}, 0}, seed, s);
      const auto b = bai::simulate_replication(env, 1000, {bai::AdaptivePlugIn{50}, 0}, seed, v);
      CHECK(std::fabs(a.x1 - b.x1) <= 1e-12);
      differ += a.decision != b.decision;
      if (f == Family::bernoulli) {
        // half-integer sums are exact in any order
        CHECK(a.x1 == b.x1);
        CHECK(a.x0 == b.x0);
        CHECK(a.n1 == b.n1);
        CHECK(a.sigma1_used == b.sigma1_used);
      }
    }
  }
  CHECK(differ == 0);
}

TEST_CASE("Bernoulli Neyman attains V* at the least-favorable gap") {
  // sigma = 1/2 per arm, so V* = 1 * max d Phi(-d) and eta* = delta*
  const auto env = LocalEnvironment::at_gap(Family::bernoulli, oracle::kDeltaStar);
  const auto e = trial(env, 10000, bai::neyman_policy(0.5, 0.5), 40000, 9);
  CHECK(std::fabs(e.mean - oracle::kGapObjectiveMax) <= 0.07 * oracle::kGapObjectiveMax);
}

TEST_CASE("grid-sup over gaps peaks near eta*") {
  const double eta = 2 * oracle::kDeltaStar;
  const std::vector<double> gaps{0.5 * eta, eta, 1.5 * eta, 2 * eta};
  const std::vector<std::uint64_t> ns{10000};
  const auto t = bai::scaled_regret_curve(Family::gaussian, 1, 1, bai::neyman_policy(1, 1), gaps, ns, 10000, 10);
  REQUIRE(t.rows.size() == 4);
  REQUIRE(t.sup_by_n.size() == 1);
  CHECK(t.sup_by_n[0].gap == eta);
  CHECK(std::fabs(t.sup_by_n[0].estimate.mean - oracle::kVStar11) <= 0.05 * oracle::kVStar11);
  for (std::size_t i = 0; i < 4; ++i) {
    const double d = gaps[i];
    CHECK(std::fabs(t.rows[i].estimate.mean - d * oracle::normal_cdf(-d / 2)) <= 4 * t.rows[i].estimate.std_error);
  }
}

TEST_CASE("equal split on the symmetric gap ray with sigma = (2, 1)") {
  // With h1 = -h0 the equal-split statistic drifts at 0.375 * gap against
  // Neyman's gap / 3, so its grid-sup is max d Phi(-0.375 d) < V*(2, 1).
  const std::vector<double> gaps{1.5, 2.0, 2.5, 3.0};
  const std::vector<std::uint64_t> ns{1000};
  const auto equal = bai::scaled_regret_curve(Family::gaussian, 2, 1, {bai::EqualSplit{}, 0}, gaps, ns, 20000, 11);
  const auto ney = bai::scaled_regret_curve(Family::gaussian, 2, 1, bai::neyman_policy(2, 1), gaps, ns, 20000, 11);
  const double equal_sup = oracle::kGapObjectiveMax / 0.375;
  CHECK(std::fabs(equal.sup_by_n[0].estimate.mean - equal_sup) <= 0.05 * equal_sup);
  CHECK(std::fabs(ney.sup_by_n[0].estimate.mean - oracle::kVStar21) <= 0.05 * oracle::kVStar21);
}

TEST_CASE("equal split is beaten by Neyman once nature shifts the mean level") {
  // Finite-sample counterpart of the divergence probe: gap 5, both means far
  // below zero, on the branch where under-sampling arm 1 hurts.
  const auto probe = bai::probe_environment(bai::NatureSide::theta0, 5, 2, 1);
  const LocalEnvironment env{Family::gaussian, probe.mu1, probe.mu0, 2, 1};
  const auto equal = trial(env, 1000, {bai::EqualSplit{}, 0}, 20000, 13);
  const auto ney = trial(env, 1000, bai::neyman_policy(2, 1), 20000, 13);
  CHECK(equal.mean > oracle::kVStar21);
  CHECK(ney.mean < oracle::kVStar21);
  CHECK(equal.mean > ney.mean + 4 * std::hypot(equal.std_error, ney.std_error));
}

TEST_CASE("zero-gap column of any curve is zero") {
  const std::vector<double> gaps{0.0, 1.0};
  const std::vector<std::uint64_t> ns{50, 200};
  for (const bai::PolicySpec& p : {bai::PolicySpec{bai::EqualSplit{}, 0}, bai::PolicySpec{bai::TwoStage{0.5}, 0}}) {
    const auto t = bai::scaled_regret_curve(Family::gaussian, 1, 1, p, gaps, ns, 200, 12);
    CHECK(t.rows[0].estimate.mean == 0.0);
    CHECK(t.rows[2].estimate.mean == 0.0);
    CHECK(t.rows[2].n == 200);
  }
}
