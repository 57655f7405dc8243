#pragma once

#include "cfsyn/controller.hpp"

#include <array>

namespace cfsyn::closed_form3 {

/// The worked third-order controller (n = 3, d = 1, gains a = (-6, -25, -45),
/// a0 = 2/205) with all exact data hard-coded.  Kept independent of the
/// synthesis pipeline so the two can cross-check each other.
ControllerSpec example_controller();

/// Integration constants of the closed-loop solution through x0.  The third
/// component solves an Euler equation in (theta0 - t); its exponents for this
/// gain set are 3 and 3 +/- i*sqrt(6) after the substitution, giving one secular
/// mode c1 and an oscillatory pair (c2, c3), equivalently amplitude-phase
/// data (xi1, xi2) at t = 0.
struct ClosedFormCoeffs {
  double theta0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double xi1 = 0.0;
  double xi2 = 0.0;
};

/// Computes theta0 by bisecting the degree-6 resolvent
///   theta^6 = 41 theta^4 x1^2 + 410 theta^3 x1 x2 + 820 theta^2 x1 x3
///             + 1230 theta^2 x2^2 + 5330 theta x2 x3 + 6150 x3^2
/// and then the constants from the t = 0 boundary conditions.  Throws
/// std::invalid_argument at the origin.
ClosedFormCoeffs closed_form_coeffs(const std::array<double, 3>& x0);

/// State of the exact solution at time t in [0, theta0).  Throws
/// std::domain_error for t outside the interval of motion.
std::array<double, 3> closed_form_state(const ClosedFormCoeffs& cf, double t);
std::array<double, 3> closed_form_state(const std::array<double, 3>& x0,
                                        double t);

/// The feedback along the exact solution at time t in [0, theta0).
double closed_form_control(const ClosedFormCoeffs& cf, double t);
double closed_form_control(const std::array<double, 3>& x0, double t);

}  // namespace cfsyn::closed_form3
