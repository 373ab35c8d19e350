#pragma once

#include <cstdint>

namespace bai {

enum class Arm : std::uint8_t { arm0 = 0, arm1 = 1 };

constexpr int to_int(Arm a) { return a == Arm::arm1 ? 1 : 0; }

// True means and reward standard deviations of the two arms.
struct Environment {
  double mu1 = 0.0;
  double mu0 = 0.0;
  double sigma1 = 1.0;
  double sigma0 = 1.0;

  double gap() const { return mu1 - mu0; }
};

// Throws DomainError unless both sigmas are positive and all fields finite.
void validate(const Environment& env);

// Cumulative outcomes and sampling times at time t of the diffusion experiment.
struct ExperimentState {
  double t = 0.0;
  double x1 = 0.0;
  double x0 = 0.0;
  double q1 = 0.0;
  double q0 = 0.0;
};

}  // namespace bai
