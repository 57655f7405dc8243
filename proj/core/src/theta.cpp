#include "cfsyn/theta.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cfsyn::theta {

namespace {

// Magnitudes below this are treated as the origin: the dilation scaling
// xhat_i = x_i / sigma^i stays inside the normal double range for anything larger.
constexpr double kOriginGuard = 1e-280;
constexpr double kRelTol = 1e-13;
constexpr int kMaxIterations = 200;

// Neumaier-compensated accumulator; the polynomial has up to 17 terms of
// mixed sign and the residual check needs every digit the terms allow.
struct Acc {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

struct ScaledProblem {
  double sigma = 0.0;             // dilation parameter, theta = sigma * theta_hat
  Eigen::VectorXd xhat;           // xhat_i = x_i / sigma^i
  std::vector<double> coeff;      // ascending, degree 2n, root theta_hat near 1
};

// p(T) and p'(T) by compensated term summation (not Horner: the terms span
// many magnitudes near small roots and we want the cancellation handled).
void eval_poly(const std::vector<double>& c, double t, double* p, double* dp) {
  Acc ap, adp;
  double tk = 1.0;  // t^k
  for (std::size_t k = 0; k < c.size(); ++k) {
    ap.add(c[k] * tk);
    if (k + 1 < c.size()) adp.add(c[k + 1] * double(k + 1) * tk);
    tk *= t;
  }
  *p = ap.value();
  *dp = adp.value();
}

std::vector<double> poly_from_state(const ControllerSpec& spec,
                                    const Eigen::VectorXd& x) {
  const int n = spec.n;
  std::vector<double> c(2 * n + 1, 0.0);
  c[2 * n] = 2.0 * spec.a0;
  // S_m = sum_{i+j=m} F_ij x_i x_j over 1-based i, j.
  for (int m = 2; m <= 2 * n; ++m) {
    Acc s;
    for (int i = std::max(1, m - n); i <= std::min(n, m - 1); ++i) {
      const int j = m - i;
      s.add(spec.F(i - 1, j - 1) * x(i - 1) * x(j - 1));
    }
    c[2 * n - m] = -s.value();
  }
  return c;
}

// Balances the state so that the positive root of the scaled polynomial sits
// within a bounded window around 1 (above by sqrt(n), below by a spectral
// factor of F).  Each diagonal term F_ii x_i^2 / sigma^{2i} is clamped to 2 a0.
double heuristic_scale(const ControllerSpec& spec, const Eigen::VectorXd& x) {
  double sigma = 0.0;
  for (int i = 1; i <= spec.n; ++i) {
    const double xi = std::abs(x(i - 1));
    if (xi == 0.0) continue;
    const double balance =
        std::pow(xi, 1.0 / i) *
        std::pow(spec.F(i - 1, i - 1) / (2.0 * spec.a0), 1.0 / (2.0 * i));
    sigma = std::max(sigma, balance);
  }
  return sigma;
}

ScaledProblem scale_problem(const ControllerSpec& spec,
                            const Eigen::VectorXd& x, double sigma) {
  ScaledProblem sp;
  sp.sigma = sigma;
  sp.xhat.resize(spec.n);
  // Repeated division: intermediate magnitudes move monotonically toward the
  // final value, so no spurious overflow for extreme sigma.
  double acc;
  for (int i = 0; i < spec.n; ++i) {
    acc = x(i);
    for (int k = 0; k <= i; ++k) acc /= sigma;
    sp.xhat(i) = acc;
  }
  sp.coeff = poly_from_state(spec, sp.xhat);
  return sp;
}

[[noreturn]] void throw_bracket_failure(const char* what, double sigma,
                                        double lo, double hi, double plo,
                                        double phi) {
  std::ostringstream msg;
  msg << "theta solve failed: " << what << " (scale=" << sigma
      << ", bracket=[" << lo << ", " << hi << "], p=[" << plo << ", " << phi
      << "]); the controller data is likely corrupted";
  throw SolverError(msg.str());
}

ThetaValue solve_impl(const ControllerSpec& spec, const Eigen::VectorXd& x,
                      double sigma_seed) {
  ThetaValue out;
  if (x.size() != spec.n)
    throw SolverError("theta solve failed: state dimension mismatch");

  const double maxabs = x.cwiseAbs().maxCoeff();
  if (!(maxabs > kOriginGuard)) {
    if (!std::isfinite(maxabs))
      throw SolverError("theta solve failed: non-finite state");
    out.theta = 0.0;
    out.converged = true;
    return out;
  }

  double sigma = sigma_seed;
  if (!(sigma > 0.0) || !std::isfinite(sigma)) sigma = heuristic_scale(spec, x);
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw SolverError("theta solve failed: state too extreme to scale");

  const ScaledProblem sp = scale_problem(spec, x, sigma);
  const std::vector<double>& c = sp.coeff;

  // Bracket the root by doubling/halving from 1.  p < 0 left of the root and
  // p > 0 right of it (single positive crossing).
  double lo = 1.0, hi = 1.0, plo, phi, dp_unused;
  eval_poly(c, 1.0, &plo, &dp_unused);
  phi = plo;
  int iters = 0;
  if (plo < 0.0) {
    while (phi < 0.0) {
      hi *= 2.0;
      if (++iters > 2200 || !std::isfinite(hi))
        throw_bracket_failure("no sign change above the seed", sigma, lo, hi,
                              plo, phi);
      eval_poly(c, hi, &phi, &dp_unused);
    }
    lo = hi / 2.0;
    eval_poly(c, lo, &plo, &dp_unused);
  } else if (plo > 0.0) {
    while (plo > 0.0) {
      lo /= 2.0;
      if (++iters > 2200 || lo == 0.0)
        throw_bracket_failure("no sign change below the seed", sigma, lo, hi,
                              plo, phi);
      eval_poly(c, lo, &plo, &dp_unused);
    }
    hi = lo * 2.0;
    eval_poly(c, hi, &phi, &dp_unused);
  }

  // Safeguarded Newton: take the Newton step when it stays inside the bracket
  // and halves the width fast enough, otherwise bisect.
  double xl = lo, xh = hi;
  double rts = (plo == 0.0) ? lo : (phi == 0.0 ? hi : 0.5 * (xl + xh));
  double dxold = std::abs(xh - xl);
  double dx = dxold;
  double f, df;
  eval_poly(c, rts, &f, &df);
  bool converged = (f == 0.0 || plo == 0.0 || phi == 0.0);
  while (!converged && iters < kMaxIterations) {
    ++iters;
    const bool newton_leaves =
        ((rts - xh) * df - f) * ((rts - xl) * df - f) > 0.0;
    const bool newton_slow = std::abs(2.0 * f) > std::abs(dxold * df);
    if (newton_leaves || newton_slow || df == 0.0) {
      dxold = dx;
      dx = 0.5 * (xh - xl);
      rts = xl + dx;
      if (rts == xl) converged = true;
    } else {
      dxold = dx;
      dx = f / df;
      const double prev = rts;
      rts -= dx;
      if (rts == prev) converged = true;
    }
    if (std::abs(dx) < kRelTol * rts) converged = true;
    eval_poly(c, rts, &f, &df);
    if (f == 0.0) converged = true;
    if (f < 0.0)
      xl = rts;
    else
      xh = rts;
  }
  if (!converged)
    throw_bracket_failure("iteration budget exhausted", sigma, xl, xh, f, f);

  out.theta = sigma * rts;
  out.converged = true;
  out.iterations = iters;
  // Residual of the original implicit equation: p(T)/T^{2n-1} rescales the
  // polynomial form back to (D F D x, x) - 2 a0 theta units, times sigma for the
  // dilation.
  out.residual = sigma * std::abs(f) / std::pow(rts, 2.0 * spec.n - 1.0);
  return out;
}

}  // namespace

ThetaValue solve_theta(const ControllerSpec& spec, const Eigen::VectorXd& x) {
  return solve_impl(spec, x, 0.0);
}

ThetaValue solve_theta(const ControllerSpec& spec, const Eigen::VectorXd& x,
                       double warm_start) {
  return solve_impl(spec, x, warm_start);
}

double control(const ControllerSpec& spec, const Eigen::VectorXd& x) {
  const ThetaValue tv = solve_theta(spec, x);
  if (tv.theta == 0.0) return 0.0;
  return control_with_theta(spec, x, tv.theta);
}

double control_with_theta(const ControllerSpec& spec, const Eigen::VectorXd& x,
                          double theta_value) {
  if (!(theta_value > 0.0))
    throw SolverError("control evaluation needs a positive theta");
  // u = sum a_k x_k / theta^k, evaluated through the scaled state so that the sum
  // is exactly invariant under power-of-two dilations.
  Acc u;
  double acc;
  for (int k = 0; k < spec.n; ++k) {
    acc = x(k);
    for (int j = 0; j <= k; ++j) acc /= theta_value;
    u.add(spec.a(k) * acc);
  }
  return u.value();
}

std::vector<double> theta_polynomial_coeffs(const ControllerSpec& spec,
                                            const Eigen::VectorXd& x) {
  if (x.size() != spec.n)
    throw SolverError("theta polynomial: state dimension mismatch");
  return poly_from_state(spec, x);
}

double theta_directional_derivative(const ControllerSpec& spec,
                                    const Eigen::VectorXd& x) {
  const ThetaValue tv = solve_theta(spec, x);
  if (tv.theta == 0.0)
    throw SolverError("theta derivative is undefined at the origin");
  const Eigen::VectorXd xhat = scaled_state(x, tv.theta);
  // With sigma = theta the scaled root is theta_hat = 1 and yhat = xhat exactly.
  const Eigen::VectorXd y = xhat;
  const double num = y.dot(spec.lyap_sym * y);
  const double den = y.dot(spec.slope_form * y);
  if (!(den > 0.0))
    throw SolverError("theta derivative: slope form not positive at state");
  return num / den;
}

double control_bound(const ControllerSpec& spec) { return spec.control_sup; }

Eigen::VectorXd scaled_state(const Eigen::VectorXd& x, double scale) {
  Eigen::VectorXd xhat(x.size());
  double acc;
  for (int i = 0; i < x.size(); ++i) {
    acc = x(i);
    for (int k = 0; k <= i; ++k) acc /= scale;
    xhat(i) = acc;
  }
  return xhat;
}

}  // namespace cfsyn::theta
