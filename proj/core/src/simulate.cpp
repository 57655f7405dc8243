#include "cfsyn/simulate.hpp"

#include "cfsyn/theta.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace cfsyn::simulate {

namespace {

// Dormand-Prince 5(4) coefficients.  Stage 7 equals the next step's stage 1
// (FSAL), so an accepted step costs six field evaluations.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
// 5th-order solution weights (identical to kA[6] plus the zero k7 weight).
constexpr double kB[7] = {35.0 / 384,    0.0,        500.0 / 1113, 125.0 / 192,
                          -2187.0 / 6784, 11.0 / 84, 0.0};
// Error weights b - b*.
constexpr double kE[7] = {71.0 / 57600,       0.0,        -71.0 / 16695,
                          71.0 / 1920,        -17253.0 / 339200,
                          22.0 / 525,         -1.0 / 40};

struct FieldEval {
  Eigen::VectorXd dx;
  double theta = 0.0;
  double u = 0.0;
};

FieldEval eval_field(const ControllerSpec& spec, const Eigen::VectorXd& x,
                     double theta_warm) {
  FieldEval fe;
  const theta::ThetaValue tv = theta::solve_theta(spec, x, theta_warm);
  fe.theta = tv.theta;
  fe.u = tv.theta > 0.0 ? theta::control_with_theta(spec, x, tv.theta) : 0.0;
  fe.dx.resize(spec.n);
  fe.dx(0) = fe.u;
  for (int i = 1; i < spec.n; ++i) fe.dx(i) = x(i - 1);
  return fe;
}

void append_row(std::ostream& out, const Sample& s, int n) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", s.t);
  out << buf;
  for (int i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", s.x(i));
    out << ',' << buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", s.theta);
  out << ',' << buf;
  std::snprintf(buf, sizeof buf, "%.17g", s.u);
  out << ',' << buf << '\n';
}

}  // namespace

TrajectoryRecord integrate(const ControllerSpec& spec,
                           const Eigen::VectorXd& x0,
                           const SimulationConfig& config) {
  if (x0.size() != spec.n)
    throw std::invalid_argument("integrate: x0 dimension mismatch");
  if (!(config.rtol > 0.0) || !(config.atol > 0.0) ||
      !(config.theta_stop > 0.0) || config.max_steps < 1 ||
      config.record_stride < 1)
    throw std::invalid_argument("integrate: invalid configuration");

  TrajectoryRecord rec;
  if (x0.cwiseAbs().maxCoeff() == 0.0) return rec;  // already at the origin

  std::vector<double> checkpoints = config.checkpoints;
  std::sort(checkpoints.begin(), checkpoints.end());
  std::size_t next_cp = 0;

  FieldEval fe = eval_field(spec, x0, 0.0);
  rec.theta0 = fe.theta;
  rec.max_abs_u = std::abs(fe.u);

  double t = 0.0;
  Eigen::VectorXd x = x0;
  rec.samples.push_back({t, x, fe.theta, fe.u});

  if (fe.theta <= config.theta_stop) {
    rec.t_final = 0.0;
    rec.time_of_motion = fe.theta;
    return rec;
  }

  double h = 0.01 * fe.theta;
  Eigen::VectorXd k[7];
  Eigen::VectorXd xs(spec.n), xnew(spec.n), xerr(spec.n);
  k[0] = fe.dx;
  long since_record = 0;

  for (long step = 0; step < config.max_steps; ++step) {
    h = std::min(h, 0.1 * fe.theta);
    while (next_cp < checkpoints.size() && checkpoints[next_cp] <= t)
      ++next_cp;
    bool landing = false;
    if (next_cp < checkpoints.size() && t + h >= checkpoints[next_cp]) {
      h = checkpoints[next_cp] - t;
      landing = true;
    }
    if (!(h > 1e-15 * std::max(t, 1.0))) {
      std::ostringstream msg;
      msg << "step size collapsed at t=" << t << " (theta=" << fe.theta
          << ", h=" << h << ")";
      throw SingularityError(msg.str());
    }

    // Stages 2..7; stage 7 lands on the candidate point, so on acceptance its
    // evaluation doubles as the next step's stage 1 (FSAL).
    double stage_theta = fe.theta;
    FieldEval fs7;
    for (int s = 1; s < 7; ++s) {
      xs = x;
      for (int j = 0; j < s; ++j) xs += (h * kA[s][j]) * k[j];
      FieldEval fs = eval_field(spec, xs, stage_theta);
      stage_theta = fs.theta;
      k[s] = fs.dx;
      if (s == 6) {
        xnew = xs;  // stage 7 point == 5th-order solution
        fs7 = std::move(fs);
      }
    }

    xerr.setZero();
    for (int s = 0; s < 7; ++s) xerr += (h * kE[s]) * k[s];
    double err_sq = 0.0;
    for (int i = 0; i < spec.n; ++i) {
      const double sc = config.atol +
                        config.rtol * std::max(std::abs(x(i)), std::abs(xnew(i)));
      const double q = xerr(i) / sc;
      err_sq += q * q;
    }
    const double err = std::sqrt(err_sq / spec.n);

    if (err <= 1.0) {
      ++rec.accepted_steps;
      t += h;
      x = xnew;
      fe = std::move(fs7);
      k[0] = k[6];
      rec.max_abs_u = std::max(rec.max_abs_u, std::abs(fe.u));

      const bool stopping = fe.theta <= config.theta_stop;
      ++since_record;
      if (landing || stopping || since_record >= config.record_stride) {
        rec.samples.push_back({t, x, fe.theta, fe.u});
        since_record = 0;
      }
      if (landing) ++next_cp;
      if (stopping) {
        rec.t_final = t;
        rec.time_of_motion = t + fe.theta;
        return rec;
      }
    } else {
      ++rec.rejected_steps;
    }

    const double factor =
        err == 0.0 ? 5.0
                   : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h *= factor;
  }

  std::ostringstream msg;
  msg << "step budget (" << config.max_steps << ") exhausted at t=" << t
      << " with theta=" << fe.theta << " (stop threshold "
      << config.theta_stop << ")";
  throw BudgetError(msg.str());
}

double verify_theta_decay(const ControllerSpec& spec,
                          const TrajectoryRecord& record) {
  double worst = 0.0;
  for (const Sample& s : record.samples) {
    const theta::ThetaValue tv = theta::solve_theta(spec, s.x, s.theta);
    worst = std::max(worst, std::abs(tv.theta - (record.theta0 - s.t)));
  }
  return worst;
}

double verify_control_bound(const ControllerSpec& spec,
                            const TrajectoryRecord& record) {
  double max_u = 0.0;
  if (record.samples.empty()) return -spec.d;
  for (const Sample& s : record.samples)
    max_u = std::max(max_u, std::abs(s.u));
  return std::max(max_u, record.max_abs_u) - spec.d;
}

void write_trajectory_csv(const TrajectoryRecord& record, int n,
                          std::ostream& out) {
  out << 't';
  for (int i = 1; i <= n; ++i) out << ",x" << i;
  out << ",theta,u\n";
  for (const Sample& s : record.samples) append_row(out, s, n);
}

void write_trajectory_csv(const TrajectoryRecord& record, int n,
                          const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_trajectory_csv(record, n, out);
  if (!out) throw std::runtime_error("failed to write " + path);
}

}  // namespace cfsyn::simulate
