#include "cfsyn/simulate.hpp"

#include "cfsyn/closed_form3.hpp"
#include "cfsyn/sampling.hpp"
#include "cfsyn/synthesis.hpp"
#include "cfsyn/theta.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

using namespace cfsyn;

namespace {

ControllerSpec spec_for(int n) {
  synthesis::SynthesisParams params;
  params.n = n;
  return synthesis::synthesize(params);
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<double> parse_csv_row(const std::string& row) {
  std::vector<double> vals;
  std::istringstream in(row);
  std::string cell;
  while (std::getline(in, cell, ',')) vals.push_back(std::strtod(cell.c_str(), nullptr));
  return vals;
}

}  // namespace

TEST_CASE("starting at the origin yields an empty trajectory") {
  const ControllerSpec spec = spec_for(3);
  const simulate::TrajectoryRecord rec =
      simulate::integrate(spec, Eigen::VectorXd::Zero(3));
  CHECK(rec.samples.empty());
  CHECK(rec.theta0 == 0.0);
  CHECK(rec.time_of_motion == 0.0);
  CHECK(simulate::verify_theta_decay(spec, rec) == 0.0);
  CHECK(simulate::verify_control_bound(spec, rec) == -spec.d);
}

TEST_CASE("states already inside the stop radius are returned as-is") {
  const ControllerSpec spec = spec_for(2);
  Eigen::VectorXd x0(2);
  x0 << 1e-12, 1e-14;
  simulate::SimulationConfig config;
  config.theta_stop = 1e-3;
  const simulate::TrajectoryRecord rec = simulate::integrate(spec, x0, config);
  REQUIRE(rec.samples.size() == 1);
  CHECK(rec.t_final == 0.0);
  CHECK(rec.time_of_motion == rec.theta0);
  CHECK(rec.samples[0].x == x0);
}

TEST_CASE("special curve: time of motion is one and the feedback saturates") {
  const ControllerSpec spec = closed_form3::example_controller();
  Eigen::VectorXd x0(3);
  x0 << 11.0 / 41.0, -1.0 / 41.0, 0.0;
  const simulate::TrajectoryRecord rec = simulate::integrate(spec, x0);
  CHECK(std::abs(rec.theta0 - 1.0) < 1e-12);
  CHECK(std::abs(rec.time_of_motion - 1.0) < 1e-5);
  CHECK(rec.max_abs_u <= 1.0 + 1e-9);
  // the feedback pins to the boundary value -1 along this curve
  CHECK(std::abs(rec.samples.front().u + 1.0) < 1e-9);
  // the final sample is the first one at or below the stop radius
  CHECK(rec.samples.back().theta <= 1e-8 * (1.0 + 1e-9));
  CHECK(rec.samples.back().theta > 0.0);
  CHECK(rec.rejected_steps < rec.accepted_steps);
}

TEST_CASE("time of motion matches the initial theta for a generic state") {
  const ControllerSpec spec = spec_for(2);
  Eigen::VectorXd x0(2);
  x0 << 1.0, 1.0;
  const double theta0 = theta::solve_theta(spec, x0).theta;
  const simulate::TrajectoryRecord rec = simulate::integrate(spec, x0);
  CHECK(std::abs(rec.theta0 - theta0) < 1e-13 * theta0);
  CHECK(std::abs(rec.time_of_motion - theta0) < 1e-5 * theta0);
  CHECK(simulate::verify_control_bound(spec, rec) <= 1e-9);
}

TEST_CASE("theta decays with unit rate along integrated trajectories") {
  const ControllerSpec spec = spec_for(3);
  sampling::SphereSampler sampler(404);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::VectorXd x0 = sampler.sample(3, trial % 2 ? 1.0 : 20.0);
    const simulate::TrajectoryRecord rec = simulate::integrate(spec, x0);
    CAPTURE(trial);
    CHECK(simulate::verify_theta_decay(spec, rec) <= 1e-6 * rec.theta0);
    CHECK(simulate::verify_control_bound(spec, rec) <= 1e-9);
  }
}

TEST_CASE("checkpoints are landed on exactly") {
  const ControllerSpec spec = spec_for(3);
  Eigen::VectorXd x0(3);
  x0 << 0.7, -0.3, 1.1;
  const double theta0 = theta::solve_theta(spec, x0).theta;
  simulate::SimulationConfig config;
  config.checkpoints = {0.15 * theta0, 0.37 * theta0, 0.8 * theta0};
  config.record_stride = 50;  // landings are recorded regardless of stride
  const simulate::TrajectoryRecord rec = simulate::integrate(spec, x0, config);
  for (double cp : config.checkpoints) {
    bool found = false;
    for (const simulate::Sample& s : rec.samples) found = found || s.t == cp;
    CAPTURE(cp);
    CHECK(found);
  }
}

TEST_CASE("record stride thins the samples but keeps the endpoints") {
  const ControllerSpec spec = spec_for(3);
  Eigen::VectorXd x0(3);
  x0 << 1.0, 0.5, -0.25;
  const simulate::TrajectoryRecord dense = simulate::integrate(spec, x0);
  simulate::SimulationConfig config;
  config.record_stride = 10;
  const simulate::TrajectoryRecord thin = simulate::integrate(spec, x0, config);
  CHECK(thin.samples.size() < dense.samples.size());
  CHECK(thin.samples.size() >= dense.samples.size() / 10);
  CHECK(thin.samples.front().t == 0.0);
  CHECK(thin.samples.back().t == thin.t_final);
  CHECK(thin.t_final == dense.t_final);  // same steps, fewer records
  CHECK(thin.accepted_steps == dense.accepted_steps);
}

TEST_CASE("step budget exhaustion raises a budget error") {
  const ControllerSpec spec = spec_for(3);
  Eigen::VectorXd x0(3);
  x0 << 1.0, 1.0, 1.0;
  simulate::SimulationConfig config;
  config.max_steps = 5;
  CHECK_THROWS_AS(simulate::integrate(spec, x0, config),
                  simulate::BudgetError);
}

TEST_CASE("an unreachable stop radius collapses the step size") {
  const ControllerSpec spec = spec_for(2);
  Eigen::VectorXd x0(2);
  x0 << 1.0, 0.0;
  simulate::SimulationConfig config;
  config.theta_stop = 1e-300;  // theta reaches the step-underflow floor first
  CHECK_THROWS_AS(simulate::integrate(spec, x0, config),
                  simulate::SingularityError);
}

TEST_CASE("configuration and dimension errors") {
  const ControllerSpec spec = spec_for(2);
  Eigen::VectorXd x0(2);
  x0 << 1.0, 0.0;
  CHECK_THROWS_AS(simulate::integrate(spec, Eigen::VectorXd::Zero(3)),
                  std::invalid_argument);
  simulate::SimulationConfig bad;
  bad.rtol = 0.0;
  CHECK_THROWS_AS(simulate::integrate(spec, x0, bad), std::invalid_argument);
  bad = {};
  bad.record_stride = 0;
  CHECK_THROWS_AS(simulate::integrate(spec, x0, bad), std::invalid_argument);
  bad = {};
  bad.max_steps = 0;
  CHECK_THROWS_AS(simulate::integrate(spec, x0, bad), std::invalid_argument);
}

TEST_CASE("CSV output round-trips every recorded value") {
  const ControllerSpec spec = spec_for(3);
  Eigen::VectorXd x0(3);
  x0 << 0.3, -0.9, 0.05;
  simulate::SimulationConfig config;
  config.record_stride = 20;
  const simulate::TrajectoryRecord rec = simulate::integrate(spec, x0, config);

  std::ostringstream out;
  simulate::write_trajectory_csv(rec, 3, out);
  const std::vector<std::string> lines = split_lines(out.str());
  REQUIRE(lines.size() == rec.samples.size() + 1);
  CHECK(lines[0] == "t,x1,x2,x3,theta,u");
  for (std::size_t i = 0; i < rec.samples.size(); ++i) {
    const std::vector<double> row = parse_csv_row(lines[i + 1]);
    REQUIRE(row.size() == 6);
    const simulate::Sample& s = rec.samples[i];
    CHECK(row[0] == s.t);
    CHECK(row[1] == s.x(0));
    CHECK(row[2] == s.x(1));
    CHECK(row[3] == s.x(2));
    CHECK(row[4] == s.theta);
    CHECK(row[5] == s.u);
  }
}
