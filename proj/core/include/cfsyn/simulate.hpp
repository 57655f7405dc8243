#pragma once

#include "cfsyn/controller.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace cfsyn::simulate {

struct SimulationConfig {
  double rtol = 1e-10;
  double atol = 1e-12;
  /// Integration stops once theta(x) falls below this; the reported time of
  /// motion adds the residual theta back, so the total is exact to solver
  /// accuracy.
  double theta_stop = 1e-8;
  long max_steps = 200000;
  /// Record every k-th accepted step (the initial and final states are always
  /// recorded).
  int record_stride = 1;
  /// Times the integrator must land on exactly (clamping the step), e.g. for
  /// pointwise comparison against a closed-form trajectory.
  std::vector<double> checkpoints;
};

struct Sample {
  double t = 0.0;
  Eigen::VectorXd x;
  double theta = 0.0;
  double u = 0.0;
};

struct TrajectoryRecord {
  std::vector<Sample> samples;
  double theta0 = 0.0;
  double t_final = 0.0;
  /// t_final + theta(x(t_final)): the exact extinction time predicted by the
  /// identity dtheta/dt = -1.
  double time_of_motion = 0.0;
  double max_abs_u = 0.0;
  long accepted_steps = 0;
  long rejected_steps = 0;
};

/// The trajectory entered a state the theta solver cannot handle, or step-size
/// control collapsed (step underflow).
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// max_steps exhausted before theta reached theta_stop.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integrates x' = A0 x + b0 u(x) from x0 with an embedded 5(4) Runge-Kutta
/// pair (Dormand-Prince coefficients, FSAL).  The step size is additionally
/// capped at 0.1 theta(x) so the feedback's theta^{-k} factors stay resolved as the
/// trajectory approaches the origin.  Every stage evaluation re-solves theta,
/// warm-started from the previous value.
TrajectoryRecord integrate(const ControllerSpec& spec,
                           const Eigen::VectorXd& x0,
                           const SimulationConfig& config = {});

/// max over recorded samples of |theta(x(t)) - (theta(x0) - t)|, with theta re-solved
/// from scratch at each sample.  Zero for an empty record.
double verify_theta_decay(const ControllerSpec& spec,
                          const TrajectoryRecord& record);

/// max over recorded samples of |u| - d (negative when the bound holds with
/// margin; -d for an empty record).
double verify_control_bound(const ControllerSpec& spec,
                            const TrajectoryRecord& record);

/// CSV with header t,x1,...,xn,theta,u and 17-significant-digit values.
void write_trajectory_csv(const TrajectoryRecord& record, int n,
                          std::ostream& out);
void write_trajectory_csv(const TrajectoryRecord& record, int n,
                          const std::string& path);

}  // namespace cfsyn::simulate
