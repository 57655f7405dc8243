#pragma once

#include "cfsyn/controller.hpp"

#include <stdexcept>
#include <vector>

namespace cfsyn::theta {

/// Result of one implicit solve.  `theta` is the unique positive root of
///   2 a0 theta = (D(theta) F D(theta) x, x),   D(theta) = diag(theta^{-(2i-1)/2}),
/// which is also the remaining time of motion of the closed loop started at
/// x.  `residual` is |(D F D x, x) - 2 a0 theta| at the returned root.
struct ThetaValue {
  double theta = 0.0;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solves for theta(x).  theta(0) = 0 by continuity; a state whose largest component
/// is below 1e-280 in magnitude is treated as the origin to keep the scaling
/// arithmetic representable.  Throws SolverError if bracketing or iteration
/// fails (which for an admissible controller indicates a corrupted spec).
ThetaValue solve_theta(const ControllerSpec& spec, const Eigen::VectorXd& x);

/// Same, but seeds the internal scaling with a previous theta value from a nearby
/// state.  Integrators should pass the theta of the previous accepted step.
ThetaValue solve_theta(const ControllerSpec& spec, const Eigen::VectorXd& x,
                       double warm_start);

/// The feedback u(x) = theta^{-1/2}(x) a* D(theta(x)) x = sum_k a_k x_k theta^{-k}(x).
/// u(0) = 0.
double control(const ControllerSpec& spec, const Eigen::VectorXd& x);

/// u(x) evaluated with an already-solved theta (no implicit solve).
double control_with_theta(const ControllerSpec& spec, const Eigen::VectorXd& x,
                          double theta_value);

/// Ascending coefficients c[0..2n] of the polynomial form of the implicit
/// equation: p(theta) = 2 a0 theta^{2n} - sum_{m=2}^{2n} S_m theta^{2n-m}, where
/// S_m = sum_{i+j=m} F_ij x_i x_j.  theta(x) is the unique positive root.
std::vector<double> theta_polynomial_coeffs(const ControllerSpec& spec,
                                            const Eigen::VectorXd& x);

/// Derivative of theta along the closed-loop vector field; identically -1 on
/// trajectories.  Computed from the Lyapunov quotient, not finite differences.
double theta_directional_derivative(const ControllerSpec& spec,
                                    const Eigen::VectorXd& x);

/// Sharp bound on |u| over the admissible set: sqrt(2 a0 (F^{-1}a, a)),
/// equal to d when a0 is at its maximum.
double control_bound(const ControllerSpec& spec);

/// The dilation-normalized state xhat_i = x_i / scale^i used internally by
/// the solver; exposed for tests of the scaling identity
/// theta(dilation(lambda) x) = lambda theta(x).
Eigen::VectorXd scaled_state(const Eigen::VectorXd& x, double scale);

}  // namespace cfsyn::theta
