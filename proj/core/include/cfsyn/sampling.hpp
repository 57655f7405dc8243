#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace cfsyn::sampling {

/// Deterministic sphere sampler: mt19937_64 plus a fixed Box-Muller
/// transform, so a seed reproduces the same states on every platform
/// regardless of how the standard library implements its distributions.
class SphereSampler {
 public:
  explicit SphereSampler(std::uint64_t seed) : rng_(seed) {}

  /// Uniform point on the sphere of the given radius in R^n (normalized
  /// Gaussian direction).
  Eigen::VectorXd sample(int n, double radius);

  /// One standard normal variate.
  double normal();

  /// Uniform in (0, 1].
  double uniform01();

 private:
  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace cfsyn::sampling
