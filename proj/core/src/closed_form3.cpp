#include "cfsyn/closed_form3.hpp"

#include <cmath>
#include <stdexcept>

namespace cfsyn::closed_form3 {

namespace {

const double kSqrt6 = std::sqrt(6.0);

// Left side minus right side of the resolvent; negative below the positive
// root, positive above it.
double resolvent(const std::array<double, 3>& x, double th) {
  const double th2 = th * th;
  const double rhs = 41.0 * th2 * th2 * x[0] * x[0] +
                     410.0 * th2 * th * x[0] * x[1] +
                     820.0 * th2 * x[0] * x[2] + 1230.0 * th2 * x[1] * x[1] +
                     5330.0 * th * x[1] * x[2] + 6150.0 * x[2] * x[2];
  return th2 * th2 * th2 - rhs;
}

double solve_theta0(const std::array<double, 3>& x) {
  // Bracket by halving/doubling from 1: the resolvent is negative for small
  // positive theta (the right side always dominates there) and positive for
  // large theta.
  double lo = 1.0;
  while (resolvent(x, lo) >= 0.0) {
    lo *= 0.5;
    if (lo == 0.0) throw std::runtime_error("closed form: bracketing failed");
  }
  double hi = std::max(1.0, 2.0 * lo);
  while (resolvent(x, hi) <= 0.0) {
    hi *= 2.0;
    if (!std::isfinite(hi))
      throw std::runtime_error("closed form: bracketing failed");
  }
  for (int i = 0; i < 200 && (hi - lo) > 1e-16 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (resolvent(x, mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ControllerSpec example_controller() {
  ExactControllerData data;
  data.n = 3;
  data.d = 1;
  data.a0 = rat::make(2, 205);
  data.a_n = -45;
  data.c_scale = 1;
  data.xi0 = rat::make(5, 12);
  data.threshold = rat::make(4, 9);
  data.a = {rat::make(-6), rat::make(-25), rat::make(-45)};

  data.C = RatMatrix(3, 3);
  data.C(0, 0) = rat::make(55, 4);
  data.C(0, 1) = rat::make(5);
  data.C(0, 2) = rat::make(5, 2);
  data.C(1, 0) = rat::make(5);
  data.C(1, 1) = rat::make(5, 2);
  data.C(1, 2) = rat::make(3, 2);
  data.C(2, 0) = rat::make(5, 2);
  data.C(2, 1) = rat::make(3, 2);
  data.C(2, 2) = rat::make(1);

  data.F_inv = RatMatrix(3, 3);
  data.F_inv(0, 0) = rat::make(55, 4);
  data.F_inv(0, 1) = rat::make(-5);
  data.F_inv(0, 2) = rat::make(5, 4);
  data.F_inv(1, 0) = rat::make(-5);
  data.F_inv(1, 1) = rat::make(5, 2);
  data.F_inv(1, 2) = rat::make(-3, 4);
  data.F_inv(2, 0) = rat::make(5, 4);
  data.F_inv(2, 1) = rat::make(-3, 4);
  data.F_inv(2, 2) = rat::make(1, 4);

  data.F = RatMatrix(3, 3);
  data.F(0, 0) = rat::make(4, 5);
  data.F(0, 1) = rat::make(4);
  data.F(0, 2) = rat::make(8);
  data.F(1, 0) = rat::make(4);
  data.F(1, 1) = rat::make(24);
  data.F(1, 2) = rat::make(52);
  data.F(2, 0) = rat::make(8);
  data.F(2, 1) = rat::make(52);
  data.F(2, 2) = rat::make(120);

  data.a0_max = rat::make(2, 205);
  data.control_sup_sq = rat::make(1);
  return freeze_controller(data);
}

ClosedFormCoeffs closed_form_coeffs(const std::array<double, 3>& x0) {
  if (x0[0] == 0.0 && x0[1] == 0.0 && x0[2] == 0.0)
    throw std::invalid_argument("closed form: undefined at the origin");
  ClosedFormCoeffs cf;
  cf.theta0 = solve_theta0(x0);
  const double th = cf.theta0;
  cf.c1 = (15.0 * x0[2] / (th * th) + 5.0 * x0[1] / th + x0[0]) / (6.0 * th);
  cf.xi1 = -(9.0 * x0[2] / (th * th) + 5.0 * x0[1] / th + x0[0]) / (6.0 * th);
  cf.xi2 = -(3.0 * x0[2] / th + x0[1]) / (kSqrt6 * th * th);
  const double phi = kSqrt6 * std::log(th);
  cf.c2 = cf.xi1 * std::cos(phi) - cf.xi2 * std::sin(phi);
  cf.c3 = cf.xi1 * std::sin(phi) + cf.xi2 * std::cos(phi);
  return cf;
}

std::array<double, 3> closed_form_state(const ClosedFormCoeffs& cf, double t) {
  const double th = cf.theta0;
  if (!(t >= 0.0) || !(t < th))
    throw std::domain_error("closed form: t outside [0, theta0)");
  const double s = th - t;
  const double alpha = kSqrt6 * std::log1p(-t / th);
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  std::array<double, 3> x;
  x[0] = s * (6.0 * cf.c1 + 5.0 * kSqrt6 * cf.xi2 * ca -
              5.0 * kSqrt6 * cf.xi1 * sa);
  x[1] = s * s *
         (-3.0 * cf.c1 - (3.0 * cf.xi1 + kSqrt6 * cf.xi2) * ca +
          (kSqrt6 * cf.xi1 - 3.0 * cf.xi2) * sa);
  x[2] = s * s * s * (cf.c1 + cf.xi1 * ca + cf.xi2 * sa);
  return x;
}

std::array<double, 3> closed_form_state(const std::array<double, 3>& x0,
                                        double t) {
  return closed_form_state(closed_form_coeffs(x0), t);
}

double closed_form_control(const ClosedFormCoeffs& cf, double t) {
  const double th = cf.theta0;
  if (!(t >= 0.0) || !(t < th))
    throw std::domain_error("closed form: t outside [0, theta0)");
  const double alpha = kSqrt6 * std::log1p(-t / th);
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  return -6.0 * cf.c1 + 5.0 * (6.0 * cf.xi1 - kSqrt6 * cf.xi2) * ca +
         5.0 * (kSqrt6 * cf.xi1 + 6.0 * cf.xi2) * sa;
}

double closed_form_control(const std::array<double, 3>& x0, double t) {
  return closed_form_control(closed_form_coeffs(x0), t);
}

}  // namespace cfsyn::closed_form3
