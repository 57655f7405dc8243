// cfsyn: synthesis and simulation driver for the bounded chain-of-integrators
// feedback.  Subcommands: synthesize, theta, simulate, verify, xi0.
// Exit codes: 0 ok, 1 invariant failure, 2 bad input, 3 runtime failure.

#include "cfsyn/closed_form3.hpp"
#include "cfsyn/controller_io.hpp"
#include "cfsyn/sampling.hpp"
#include "cfsyn/simulate.hpp"
#include "cfsyn/synthesis.hpp"
#include "cfsyn/theta.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using cfsyn::ControllerSpec;
using ordered_json = nlohmann::ordered_json;

Eigen::VectorXd parse_state(const std::string& text) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string token = text.substr(pos, comma - pos);
    const char* begin = token.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    while (end && *end == ' ') ++end;
    if (end == begin || (end && *end != '\0'))
      throw std::invalid_argument("cannot parse state component \"" + token +
                                  "\"");
    values.push_back(v);
    pos = comma + 1;
  }
  Eigen::VectorXd x(static_cast<int>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) x(static_cast<int>(i)) = values[i];
  return x;
}

ControllerSpec load_spec_or_die(const std::string& path) {
  return cfsyn::load_controller(path);  // runtime_error maps to exit 2
}

int run_synthesize(int n, const std::string& d, const std::string& c,
                   const std::optional<std::string>& a_n,
                   const std::optional<std::string>& a0,
                   const std::string& out_path) {
  cfsyn::synthesis::SynthesisParams params;
  params.n = n;
  params.d = cfsyn::rat::from_string(d);
  params.c_scale = cfsyn::rat::from_string(c);
  if (a_n) params.a_n = cfsyn::rat::from_string(*a_n);
  if (a0) params.a0 = cfsyn::rat::from_string(*a0);

  const cfsyn::synthesis::ValidityReport report =
      cfsyn::synthesis::validate_parameters(params);
  std::cout << cfsyn::validity_report_to_json(report);
  const ControllerSpec spec = cfsyn::synthesis::synthesize(params);
  cfsyn::save_controller(spec, out_path);
  std::cerr << "wrote " << out_path << "\n";
  return 0;
}

int run_theta(const std::string& spec_path, const std::string& x_text) {
  const ControllerSpec spec = load_spec_or_die(spec_path);
  const Eigen::VectorXd x = parse_state(x_text);
  if (x.size() != spec.n)
    throw std::invalid_argument(
        "state has " + std::to_string(x.size()) + " components, controller expects " +
        std::to_string(spec.n));
  const cfsyn::theta::ThetaValue tv = cfsyn::theta::solve_theta(spec, x);
  const double u =
      tv.theta > 0.0 ? cfsyn::theta::control_with_theta(spec, x, tv.theta) : 0.0;
  ordered_json out;
  out["theta"] = tv.theta;
  out["u"] = u;
  out["residual"] = tv.residual;
  out["iterations"] = tv.iterations;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_simulate(const std::string& spec_path, const std::string& x0_text,
                 double rtol, double atol, double theta_stop, int stride,
                 long max_steps, const std::string& out_path) {
  const ControllerSpec spec = load_spec_or_die(spec_path);
  const Eigen::VectorXd x0 = parse_state(x0_text);
  if (x0.size() != spec.n)
    throw std::invalid_argument(
        "x0 has " + std::to_string(x0.size()) + " components, controller expects " +
        std::to_string(spec.n));
  cfsyn::simulate::SimulationConfig config;
  config.rtol = rtol;
  config.atol = atol;
  config.theta_stop = theta_stop;
  config.record_stride = stride;
  config.max_steps = max_steps;
  const cfsyn::simulate::TrajectoryRecord rec =
      cfsyn::simulate::integrate(spec, x0, config);
  cfsyn::simulate::write_trajectory_csv(rec, spec.n, out_path);

  ordered_json out;
  out["theta0"] = rec.theta0;
  out["t_final"] = rec.t_final;
  out["time_of_motion"] = rec.time_of_motion;
  out["max_abs_u"] = rec.max_abs_u;
  out["max_theta_decay_deviation"] =
      cfsyn::simulate::verify_theta_decay(spec, rec);
  out["accepted_steps"] = rec.accepted_steps;
  out["rejected_steps"] = rec.rejected_steps;
  out["samples"] = rec.samples.size();
  out["csv"] = out_path;
  std::cout << out.dump(2) << "\n";
  return 0;
}

struct CheckRow {
  std::string name;
  long count = 0;
  double worst = 0.0;
  double tol = 0.0;
  enum Result { kPass, kFail, kSkip } result = kPass;
};

int run_verify(const std::string& spec_path, long samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("--samples must be at least 1");
  const ControllerSpec spec = load_spec_or_die(spec_path);
  cfsyn::sampling::SphereSampler sampler(seed);
  const double radii[3] = {1e-3, 1.0, 1e3};
  std::vector<CheckRow> rows;

  {  // Lyapunov identity of the frozen matrices.  The residual is absolute,
     // so the tolerance carries the magnitude of the identity's own terms
     // (entries of F - FH - HF); plain 1e-10 would reject the honest
     // rounding of specs whose F entries reach 1e6.
    const double res = cfsyn::synthesis::lyapunov_residual(spec);
    const double tol =
        1e-10 * std::max(1.0, spec.slope_form.cwiseAbs().maxCoeff());
    rows.push_back({"lyapunov-residual", 1, res, tol,
                    res <= tol ? CheckRow::kPass : CheckRow::kFail});
  }

  {  // theta decay rate and the control bound on random states
    double worst_dot = 0.0;
    double worst_u = -spec.control_sup;
    for (long i = 0; i < samples; ++i) {
      const Eigen::VectorXd x = sampler.sample(spec.n, radii[i % 3]);
      worst_dot = std::max(
          worst_dot,
          std::abs(cfsyn::theta::theta_directional_derivative(spec, x) + 1.0));
      worst_u = std::max(worst_u, std::abs(cfsyn::theta::control(spec, x)) -
                                      spec.control_sup);
    }
    rows.push_back({"theta-dot", samples, worst_dot, 1e-10,
                    worst_dot <= 1e-10 ? CheckRow::kPass : CheckRow::kFail});
    const double u_tol = 1e-9 * std::max(1.0, spec.control_sup);
    const double sup_excess = spec.control_sup - spec.d * (1.0 + 1e-12);
    const bool bound_ok = worst_u <= u_tol && sup_excess <= 0.0;
    rows.push_back({"control-bound", samples, std::max(worst_u, sup_excess),
                    u_tol, bound_ok ? CheckRow::kPass : CheckRow::kFail});
  }

  {  // dilation covariance of theta, invariance of u
    const long states = std::max<long>(1, samples / 10);
    const double lambdas[4] = {0.1, 0.5, 2.0, 10.0};
    double worst = 0.0;
    for (long i = 0; i < states; ++i) {
      const Eigen::VectorXd x = sampler.sample(spec.n, 1.0);
      const double th = cfsyn::theta::solve_theta(spec, x).theta;
      const double u = cfsyn::theta::control(spec, x);
      for (double lam : lambdas) {
        Eigen::VectorXd xl(spec.n);
        double w = 1.0;
        for (int k = 0; k < spec.n; ++k) {
          w *= lam;
          xl(k) = w * x(k);
        }
        const double thl = cfsyn::theta::solve_theta(spec, xl).theta;
        const double ul = cfsyn::theta::control(spec, xl);
        worst = std::max(worst, std::abs(thl - lam * th) / (lam * th));
        worst = std::max(worst, std::abs(ul - u) / std::max(1.0, std::abs(u)));
      }
    }
    rows.push_back({"dilation", states * 4, worst, 1e-10,
                    worst <= 1e-10 ? CheckRow::kPass : CheckRow::kFail});
  }

  if (spec.n == 3) {  // closed-form oracle, defined for the worked gain set
    const ControllerSpec example = cfsyn::closed_form3::example_controller();
    const bool is_example = spec.exact.a == example.exact.a &&
                            spec.exact.F == example.exact.F &&
                            spec.exact.a0 == example.exact.a0 &&
                            spec.exact.d == example.exact.d;
    if (is_example) {
      double worst = 0.0;
      const long states = 5;
      for (long i = 0; i < states; ++i) {
        const Eigen::VectorXd x0 = sampler.sample(3, 1.0);
        const cfsyn::closed_form3::ClosedFormCoeffs cf =
            cfsyn::closed_form3::closed_form_coeffs({x0(0), x0(1), x0(2)});
        for (int k = 0; k < 20; ++k) {
          const double t = 0.9 * cf.theta0 * k / 19.0;
          const auto xs = cfsyn::closed_form3::closed_form_state(cf, t);
          const double us = cfsyn::closed_form3::closed_form_control(cf, t);
          Eigen::VectorXd xv(3);
          xv << xs[0], xs[1], xs[2];
          const double u = cfsyn::theta::control(spec, xv);
          const double th = cfsyn::theta::solve_theta(spec, xv).theta;
          worst = std::max(worst, std::abs(u - us) / std::max(1.0, std::abs(us)));
          // theta along the exact path must track theta0 - t to 1e-9
          // relative; scaled by 1e3 so one row covers both tolerances.
          worst = std::max(worst,
                           1e3 * std::abs(th - (cf.theta0 - t)) / cf.theta0);
        }
      }
      rows.push_back({"closed-form", states * 20, worst, 1e-6,
                      worst <= 1e-6 ? CheckRow::kPass : CheckRow::kFail});
    } else {
      rows.push_back({"closed-form", 0, 0.0, 0.0, CheckRow::kSkip});
    }
  }

  std::printf("cfsyn verify\n");
  std::printf("controller: n=%d, d=%s, a0=%s\n", spec.n,
              spec.exact.d.get_str().c_str(), spec.exact.a0.get_str().c_str());
  std::printf("seed: %llu\nsamples: %ld\n\n",
              static_cast<unsigned long long>(seed), samples);
  std::printf("%-20s %10s %14s %12s   %s\n", "check", "samples", "worst",
              "tolerance", "result");
  bool all_ok = true;
  std::string failed;
  for (const CheckRow& row : rows) {
    const char* verdict = row.result == CheckRow::kPass   ? "pass"
                          : row.result == CheckRow::kFail ? "FAIL"
                                                          : "skip";
    if (row.result == CheckRow::kSkip) {
      std::printf("%-20s %10s %14s %12s   %s (gains differ from the worked example)\n",
                  row.name.c_str(), "-", "-", "-", verdict);
      continue;
    }
    std::printf("%-20s %10ld %14.3e %12.1e   %s\n", row.name.c_str(), row.count,
                row.worst, row.tol, verdict);
    if (row.result == CheckRow::kFail) {
      all_ok = false;
      failed += (failed.empty() ? "" : ", ") + row.name;
    }
  }
  std::printf("\nresult: %s%s\n", all_ok ? "PASS" : "FAIL",
              failed.empty() ? "" : (": " + failed).c_str());
  return all_ok ? 0 : 1;
}

int run_xi0(int n) {
  if (n < 2) throw std::invalid_argument("--n must be at least 2");
  const cfsyn::Rational xi0 = cfsyn::synthesis::compute_xi0(n);
  std::cout << xi0.get_str() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"controllability-function feedback synthesis for the chain of integrators"};
  app.require_subcommand(1);

  // synthesize
  auto* syn = app.add_subcommand("synthesize", "construct a controller and write its spec");
  int syn_n = 0;
  std::string syn_d = "1", syn_c = "1", syn_out = "controller.json";
  std::optional<std::string> syn_an, syn_a0;
  syn->add_option("--n", syn_n, "state dimension (>= 2)")->required();
  syn->add_option("--d", syn_d, "control bound (exact rational or decimal)");
  syn->add_option("--a-n", syn_an, "last gain a_n (default: margin factor 2)");
  syn->add_option("--c", syn_c, "moment-scale factor c (> 0)");
  syn->add_option("--a0", syn_a0, "controllability-function scale (default: max admissible)");
  syn->add_option("--out", syn_out, "output spec path");

  // theta
  auto* th = app.add_subcommand("theta", "evaluate theta(x) and u(x)");
  std::string th_spec, th_x;
  th->add_option("--spec", th_spec, "controller spec path")->required();
  th->add_option("--x", th_x, "state, comma-separated decimals")->required();

  // simulate
  auto* sim = app.add_subcommand("simulate", "integrate the closed loop");
  std::string sim_spec, sim_x0, sim_out = "trajectory.csv";
  double sim_rtol = 1e-10, sim_atol = 1e-12, sim_stop = 1e-8;
  int sim_stride = 1;
  long sim_max_steps = 200000;
  sim->add_option("--spec", sim_spec, "controller spec path")->required();
  sim->add_option("--x0", sim_x0, "initial state, comma-separated decimals")->required();
  sim->add_option("--rtol", sim_rtol, "relative tolerance");
  sim->add_option("--atol", sim_atol, "absolute tolerance");
  sim->add_option("--theta-stop", sim_stop, "stop once theta falls below this");
  sim->add_option("--stride", sim_stride, "record every k-th accepted step");
  sim->add_option("--max-steps", sim_max_steps, "step budget");
  sim->add_option("--out", sim_out, "trajectory CSV path");

  // verify
  auto* ver = app.add_subcommand("verify", "run the invariant suite on a spec");
  std::string ver_spec;
  long ver_samples = 1000;
  std::uint64_t ver_seed = 0;
  ver->add_option("--spec", ver_spec, "controller spec path")->required();
  ver->add_option("--samples", ver_samples, "number of random states");
  ver->add_option("--seed", ver_seed, "sampler seed");

  // xi0
  auto* xc = app.add_subcommand("xi0", "print the moment-determinant root for n");
  int xi_n = 0;
  xc->add_option("--n", xi_n, "dimension (>= 2)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // fold CLI11's many parse-error codes into the exit contract: help is a
    // success, everything else is bad input
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*syn) return run_synthesize(syn_n, syn_d, syn_c, syn_an, syn_a0, syn_out);
    if (*th) return run_theta(th_spec, th_x);
    if (*sim)
      return run_simulate(sim_spec, sim_x0, sim_rtol, sim_atol, sim_stop,
                          sim_stride, sim_max_steps, sim_out);
    if (*ver) return run_verify(ver_spec, ver_samples, ver_seed);
    if (*xc) return run_xi0(xi_n);
  } catch (const cfsyn::synthesis::SynthesisError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const cfsyn::theta::SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const cfsyn::simulate::SingularityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const cfsyn::simulate::BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
