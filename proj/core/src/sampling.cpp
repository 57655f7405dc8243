#include "cfsyn/sampling.hpp"

#include <cmath>

namespace cfsyn::sampling {

double SphereSampler::uniform01() {
  // Top 53 bits, shifted into (0, 1]: never zero, so log() below is safe.
  return static_cast<double>((rng_() >> 11) + 1) * 0x1.0p-53;
}

double SphereSampler::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * M_PI * u2;
  spare_ = r * std::sin(phi);
  have_spare_ = true;
  return r * std::cos(phi);
}

Eigen::VectorXd SphereSampler::sample(int n, double radius) {
  Eigen::VectorXd v(n);
  double norm_sq;
  do {
    for (int i = 0; i < n; ++i) v(i) = normal();
    norm_sq = v.squaredNorm();
  } while (!(norm_sq > 0.0));
  return (radius / std::sqrt(norm_sq)) * v;
}

}  // namespace cfsyn::sampling
