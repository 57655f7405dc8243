#include "cfsyn/theta.hpp"

#include "cfsyn/closed_form3.hpp"
#include "cfsyn/sampling.hpp"
#include "cfsyn/synthesis.hpp"

#include <doctest.h>

#include <cmath>

using namespace cfsyn;

namespace {

ControllerSpec spec_for(int n) {
  synthesis::SynthesisParams params;
  params.n = n;
  return synthesis::synthesize(params);
}

double eval_poly(const std::vector<double>& c, double t) {
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * t + c[k];
  return acc;
}

}  // namespace

TEST_CASE("theta on axis states of the worked example") {
  const ControllerSpec spec = closed_form3::example_controller();

  Eigen::VectorXd x(3);
  x << 0, 0, 1;  // theta^6 = 6150
  const theta::ThetaValue tv = theta::solve_theta(spec, x);
  CHECK(tv.converged);
  CHECK(std::abs(std::pow(tv.theta, 6) - 6150.0) < 6150.0 * 1e-13);

  x << 1, 0, 0;  // theta^2 = f11/(2 a0) = 41
  const theta::ThetaValue tv1 = theta::solve_theta(spec, x);
  CHECK(std::abs(tv1.theta - std::sqrt(41.0)) < 1e-13 * std::sqrt(41.0));

  x << 0, 0, 0;
  const theta::ThetaValue tv0 = theta::solve_theta(spec, x);
  CHECK(tv0.theta == 0.0);
  CHECK(tv0.converged);
  CHECK(theta::control(spec, x) == 0.0);
}

TEST_CASE("special curve: unit time of motion and saturated feedback") {
  const ControllerSpec spec = closed_form3::example_controller();
  Eigen::VectorXd x(3);
  x << 11.0 / 41.0, -1.0 / 41.0, 0.0;
  const theta::ThetaValue tv = theta::solve_theta(spec, x);
  CHECK(std::abs(tv.theta - 1.0) < 1e-12);
  CHECK(std::abs(theta::control_with_theta(spec, x, tv.theta) + 1.0) < 1e-12);
}

TEST_CASE("polynomial form: coefficients and root consistency") {
  const ControllerSpec spec = closed_form3::example_controller();

  Eigen::VectorXd e1(3);
  e1 << 1, 0, 0;
  const std::vector<double> c = theta::theta_polynomial_coeffs(spec, e1);
  REQUIRE(c.size() == 7);
  CHECK(c[6] == 2.0 * spec.a0);
  CHECK(c[4] == -spec.F(0, 0));
  CHECK(c[5] == 0.0);
  CHECK(c[0] == 0.0);

  // the solver's root is a sign change of the polynomial form
  cfsyn::sampling::SphereSampler sampler(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd x = sampler.sample(3, trial % 2 ? 1.0 : 37.5);
    const std::vector<double> p = theta::theta_polynomial_coeffs(spec, x);
    const double th = theta::solve_theta(spec, x).theta;
    const double lo = th * (1.0 - 1e-9), hi = th * (1.0 + 1e-9);
    CHECK(eval_poly(p, lo) < 0.0);
    CHECK(eval_poly(p, hi) > 0.0);
  }
}

TEST_CASE("residual bound holds across dimensions and radii") {
  const double radii[3] = {1e-3, 1.0, 1e3};
  for (int n = 2; n <= 6; ++n) {
    const ControllerSpec spec = spec_for(n);
    cfsyn::sampling::SphereSampler sampler(1000 + n);
    for (int trial = 0; trial < 60; ++trial) {
      const Eigen::VectorXd x = sampler.sample(n, radii[trial % 3]);
      const theta::ThetaValue tv = theta::solve_theta(spec, x);
      CAPTURE(n);
      CAPTURE(trial);
      CHECK(tv.converged);
      CHECK(tv.residual <= 1e-12 * std::max(2.0 * spec.a0 * tv.theta, 1.0));
    }
  }
}

TEST_CASE("power-of-two dilations are exactly covariant with a warm scale") {
  const ControllerSpec spec = spec_for(4);
  cfsyn::sampling::SphereSampler sampler(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd x = sampler.sample(4, 1.0);
    const double seed = theta::solve_theta(spec, x).theta;
    Eigen::VectorXd x2(4);
    double w = 1.0;
    for (int i = 0; i < 4; ++i) {
      w *= 2.0;
      x2(i) = w * x(i);
    }
    // seeding one solve with sigma and the other with 2 sigma makes the two
    // scaled coordinate vectors bitwise identical, so the Newton iterations
    // coincide step for step: theta doubles exactly and u is bitwise invariant
    const theta::ThetaValue tv = theta::solve_theta(spec, x, seed);
    const theta::ThetaValue tv2 = theta::solve_theta(spec, x2, 2.0 * seed);
    CHECK(tv2.theta == 2.0 * tv.theta);
    CHECK(tv2.iterations == tv.iterations);
    CHECK(theta::control_with_theta(spec, x2, tv2.theta) ==
          theta::control_with_theta(spec, x, tv.theta));
  }
}

TEST_CASE("general dilations are covariant to solver accuracy") {
  const double lambdas[4] = {0.1, 0.5, 2.0, 10.0};
  for (int n = 2; n <= 5; ++n) {
    const ControllerSpec spec = spec_for(n);
    cfsyn::sampling::SphereSampler sampler(77 + n);
    for (int trial = 0; trial < 25; ++trial) {
      const Eigen::VectorXd x = sampler.sample(n, 1.0);
      const double th = theta::solve_theta(spec, x).theta;
      const double u = theta::control(spec, x);
      for (double lam : lambdas) {
        Eigen::VectorXd xl(n);
        double w = 1.0;
        for (int i = 0; i < n; ++i) {
          w *= lam;
          xl(i) = w * x(i);
        }
        CAPTURE(n);
        CAPTURE(lam);
        const double thl = theta::solve_theta(spec, xl).theta;
        CHECK(std::abs(thl - lam * th) <= 1e-10 * lam * th);
        CHECK(std::abs(theta::control(spec, xl) - u) <=
              1e-10 * std::max(1.0, std::abs(u)));
      }
    }
  }
}

TEST_CASE("warm starts converge to the cold-start value") {
  const ControllerSpec spec = spec_for(3);
  Eigen::VectorXd x(3);
  x << 0.4, -1.2, 0.9;
  const double cold = theta::solve_theta(spec, x).theta;
  for (double seed_factor : {0.25, 0.9, 1.0, 1.1, 4.0}) {
    const theta::ThetaValue tv = theta::solve_theta(spec, x, cold * seed_factor);
    CHECK(tv.converged);
    CHECK(std::abs(tv.theta - cold) <= 1e-12 * cold);
  }
  // nonsensical seeds fall back to the scale heuristic
  CHECK(std::abs(theta::solve_theta(spec, x, -3.0).theta - cold) <= 1e-12 * cold);
  CHECK(std::abs(theta::solve_theta(spec, x, 0.0).theta - cold) <= 1e-12 * cold);
}

TEST_CASE("decay rate of theta along the field is exactly minus one") {
  for (int n = 2; n <= 6; ++n) {
    const ControllerSpec spec = spec_for(n);
    cfsyn::sampling::SphereSampler sampler(31 * n);
    for (int trial = 0; trial < 40; ++trial) {
      const Eigen::VectorXd x = sampler.sample(n, trial % 2 ? 1.0 : 1e-3);
      CAPTURE(n);
      CHECK(std::abs(theta::theta_directional_derivative(spec, x) + 1.0) <=
            1e-10);
    }
  }
}

TEST_CASE("feedback respects its supremum on random states") {
  const ControllerSpec spec = spec_for(4);
  const double bound = theta::control_bound(spec);
  CHECK(bound == spec.control_sup);
  CHECK(bound <= spec.d * (1.0 + 1e-12));
  cfsyn::sampling::SphereSampler sampler(2024);
  double max_u = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::VectorXd x = sampler.sample(4, trial % 2 ? 0.1 : 10.0);
    max_u = std::max(max_u, std::abs(theta::control(spec, x)));
  }
  CHECK(max_u <= bound * (1.0 + 1e-9));
  CHECK(max_u > 0.1 * bound);  // the bound is not vacuous
}

TEST_CASE("degenerate and invalid inputs") {
  const ControllerSpec spec = spec_for(3);

  Eigen::VectorXd tiny(3);
  tiny << 1e-290, 0, 0;  // below the origin guard
  const theta::ThetaValue tv = theta::solve_theta(spec, tiny);
  CHECK(tv.theta == 0.0);
  CHECK(tv.converged);

  Eigen::VectorXd wrong(2);
  wrong << 1, 2;
  CHECK_THROWS_AS(theta::solve_theta(spec, wrong), theta::SolverError);

  Eigen::VectorXd nan_state(3);
  nan_state << 1, std::nan(""), 0;
  CHECK_THROWS_AS(theta::solve_theta(spec, nan_state), theta::SolverError);

  CHECK_THROWS_AS(theta::theta_directional_derivative(spec, tiny),
                  theta::SolverError);
  CHECK_THROWS_AS(theta::control_with_theta(spec, tiny, 0.0),
                  theta::SolverError);
}

TEST_CASE("extreme magnitudes stay inside the scaled window") {
  const ControllerSpec spec = spec_for(5);
  Eigen::VectorXd x(5);
  x << 1e-200, 0, 1e-150, 0, 1e-120;
  const theta::ThetaValue tv = theta::solve_theta(spec, x);
  CHECK(tv.converged);
  CHECK(tv.theta > 0.0);
  CHECK(std::isfinite(tv.theta));

  Eigen::VectorXd big(5);
  big << 1e120, -1e150, 1e180, -1e200, 1e220;
  const theta::ThetaValue tb = theta::solve_theta(spec, big);
  CHECK(tb.converged);
  CHECK(std::isfinite(tb.theta));
  // dilation sanity: scaling the huge state down by 2^-k halves theta
  // bitwise when both solves are anchored to the same scale seed
  Eigen::VectorXd halved(5);
  double w = 1.0;
  for (int i = 0; i < 5; ++i) {
    w *= 0.5;
    halved(i) = big(i) * w;
  }
  const theta::ThetaValue anchored = theta::solve_theta(spec, big, tb.theta);
  const theta::ThetaValue th = theta::solve_theta(spec, halved, 0.5 * tb.theta);
  CHECK(th.theta == 0.5 * anchored.theta);
}
