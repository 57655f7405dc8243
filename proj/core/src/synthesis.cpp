#include "cfsyn/synthesis.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace cfsyn::synthesis {

namespace {

void require_dimension(int n) {
    if (n < 2) throw std::invalid_argument("dimension must be at least 2, got " + std::to_string(n));
}

Rational gain_first(int n) { return rat::make(-static_cast<long>(n) * (n + 1), 2); }

/// Alternating inverse-factorial diagonal as an exact matrix.
RatMatrix dn_matrix(int n) {
    RatMatrix d(n, n);
    Rational fact(1);
    for (int i = 1; i <= n; ++i) {
        if (i > 1) fact *= i - 1;
        d(i - 1, i - 1) = ((i - 1) % 2 == 0 ? Rational(1) : Rational(-1)) / fact;
    }
    return d;
}

/// Right-hand-side column multiplying the free parameter (entries from the
/// moment column that moves to the right when a_n is fixed).
RatVector d_prime(int n) {
    RatVector v(static_cast<std::size_t>(n - 1));
    for (int i = 1; i <= n - 1; ++i)
        v[static_cast<std::size_t>(i - 1)] = -rat::make(1, static_cast<long>(n + i) * (n + i + 1));
    return v;
}

/// Constant right-hand-side column (the part independent of a_n).
RatVector d_pprime(int n) {
    RatVector v(static_cast<std::size_t>(n - 1));
    const Rational a1 = gain_first(n);
    v[0] = -(Rational(3) + a1) / 6;
    for (int i = 2; i <= n - 1; ++i)
        v[static_cast<std::size_t>(i - 1)] = -a1 / Rational(static_cast<long>(i + 1) * (i + 2));
    return v;
}

Rational a_n_to_tilde(int n, const Rational& a_n) {
    const Rational sign = ((n - 1) % 2 == 0) ? Rational(1) : Rational(-1);
    return sign * a_n / rat::factorial(static_cast<unsigned>(n - 1));
}

Rational tilde_to_a_n(int n, const Rational& a_tilde_n) {
    const Rational sign = ((n - 1) % 2 == 0) ? Rational(1) : Rational(-1);
    return sign * rat::factorial(static_cast<unsigned>(n - 1)) * a_tilde_n;
}

/// Scale factor (2n-1)2n multiplying every moment entry of C.
Rational moment_scale(int n) { return Rational(static_cast<long>(2 * n - 1) * (2 * n)); }

/// C - HC - CH in exact arithmetic; entry (i,j) is (i+j) C_ij with 1-based
/// indices since H = diag(-(2i-1)/2).
RatMatrix dilation_weighted(const RatMatrix& m) {
    RatMatrix r(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r(i, j) = Rational(i + j + 2) * m(i, j);
    return r;
}

/// A0 + b0 a^T + I/2 - H as an exact matrix; the diagonal is (a1 + 1, 2, 3, ...).
RatMatrix closed_loop_shifted(const RatVector& a) {
    const int n = static_cast<int>(a.size());
    RatMatrix m(n, n);
    for (int j = 0; j < n; ++j) m(0, j) = a[static_cast<std::size_t>(j)];
    for (int i = 1; i < n; ++i) m(i, i - 1) += 1;
    for (int i = 0; i < n; ++i) m(i, i) += i + 1;
    return m;
}

double freeze_lyapunov_residual(const RatMatrix& F, const RatVector& a) {
    const int n = F.rows();
    Eigen::MatrixXd f(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) f(i, j) = rat::to_double(F(i, j));
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) m(0, j) = rat::to_double(a[static_cast<std::size_t>(j)]);
    for (int i = 1; i < n; ++i) m(i, i - 1) += 1.0;
    for (int i = 0; i < n; ++i) m(i, i) += static_cast<double>(i + 1);
    return (f * m + m.transpose() * f).cwiseAbs().maxCoeff();
}

}  // namespace

bool ValidityReport::pass() const {
    return threshold_ok && C_pd && C1_pd && F_pd && FHF_pd && rank_P == n - 1;
}

std::vector<std::string> ValidityReport::failures() const {
    std::vector<std::string> out;
    if (!threshold_ok) out.emplace_back("c11-threshold");
    if (!C_pd) out.emplace_back("C-positive-definite");
    if (!C1_pd) out.emplace_back("C1-positive-definite");
    if (!F_pd) out.emplace_back("F-positive-definite");
    if (!FHF_pd) out.emplace_back("FHF-positive-definite");
    if (rank_P != n - 1) out.emplace_back("P-rank");
    return out;
}

SynthesisError::SynthesisError(std::string message, ValidityReport report)
    : std::invalid_argument(std::move(message)), report_(std::move(report)) {}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> build_canonical_pair(int n) {
    require_dimension(n);
    Eigen::MatrixXd a0 = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) a0(i, i - 1) = 1.0;
    Eigen::VectorXd b0 = Eigen::VectorXd::Zero(n);
    b0(0) = 1.0;
    return {a0, b0};
}

RatMatrix hilbert_like_matrix(int s, int k) {
    if (s < 1 || k < 1) throw std::invalid_argument("hilbert_like_matrix requires s >= 1, k >= 1");
    RatMatrix m(s, s);
    for (int i = 1; i <= s; ++i)
        for (int j = 1; j <= s; ++j) m(i - 1, j - 1) = rat::make(1, i + j + k - 2);
    return m;
}

RatMatrix product_moment_matrix(int s, int k) {
    if (s < 1 || k < 1) throw std::invalid_argument("product_moment_matrix requires s >= 1, k >= 1");
    RatMatrix m(s, s);
    for (int i = 1; i <= s; ++i)
        for (int j = 1; j <= s; ++j)
            m(i - 1, j - 1) = rat::make(1, static_cast<long>(i + j + k - 2) * (i + j + k - 1));
    return m;
}

RatMatrix build_P(int n) {
    require_dimension(n);
    RatMatrix p(n, n);
    p(0, 0) = Rational(1) + gain_first(n);
    p(1, 0) = -1;
    for (int i = 1; i <= n; ++i)
        for (int j = 2; j <= n; ++j)
            p(i - 1, j - 1) = rat::make(1, static_cast<long>(i + j - 1) * (i + j));
    return p;
}

RatMatrix reduced_matrix(int n) {
    require_dimension(n);
    const RatMatrix p = build_P(n);
    RatMatrix pt(n - 1, n - 1);
    for (int i = 0; i < n - 1; ++i)
        for (int j = 0; j < n - 1; ++j) pt(i, j) = p(i + 1, j);
    return pt;
}

ReducedSolution solve_reduced_system(int n, const Rational& a_n) {
    require_dimension(n);
    const RatMatrix pt = reduced_matrix(n);
    const Rational delta = ratmat::determinant(pt);
    if (delta == 0)
        throw std::logic_error("reduced system matrix is singular; construction invariant broken");

    const RatVector dp = d_prime(n);
    const RatVector dpp = d_pprime(n);
    const RatVector vp = ratmat::solve(pt, dp);
    const RatVector vpp = ratmat::solve(pt, dpp);

    const Rational at_n = a_n_to_tilde(n, a_n);
    ReducedSolution sol;
    sol.delta = delta;
    sol.delta_p.resize(vp.size());
    sol.delta_pp.resize(vpp.size());
    RatVector y(vp.size());
    for (std::size_t j = 0; j < vp.size(); ++j) {
        sol.delta_p[j] = vp[j] * delta;
        sol.delta_pp[j] = vpp[j] * delta;
        y[j] = at_n * vp[j] + vpp[j];
    }

    // Exact back-substitution check: the solution must reproduce the
    // right-hand side a_n d' + d'' identically.
    const RatVector lhs = ratmat::mat_vec(pt, y);
    for (std::size_t j = 0; j < y.size(); ++j)
        if (lhs[j] != at_n * dp[j] + dpp[j])
            throw std::logic_error("reduced system solution failed exact verification");

    sol.c0_ratio = y[0];
    sol.a_tilde.assign(y.begin() + 1, y.end());
    return sol;
}

RatMatrix build_C(int n, const Rational& a_n, const Rational& c_scale) {
    if (c_scale <= 0) throw std::invalid_argument("c_scale must be positive");
    const Rational k = moment_scale(n) * c_scale;
    RatMatrix c(n, n);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            c(i - 1, j - 1) = k / Rational(static_cast<long>(i + j - 1) * (i + j));
    c(0, 0) = solve_reduced_system(n, a_n).c0_ratio * k;
    return c;
}

RatVector build_gain_vector(int n, const Rational& a_n) {
    require_dimension(n);
    const ReducedSolution sol = solve_reduced_system(n, a_n);
    RatVector a(static_cast<std::size_t>(n));
    a[0] = gain_first(n);
    Rational fact(1);
    for (int j = 2; j <= n - 1; ++j) {
        fact *= j - 1;
        const Rational sign = ((j - 1) % 2 == 0) ? Rational(1) : Rational(-1);
        a[static_cast<std::size_t>(j - 1)] = sign * fact * sol.a_tilde[static_cast<std::size_t>(j - 2)];
    }
    a[static_cast<std::size_t>(n - 1)] = a_n;
    return a;
}

Rational compute_xi0(int n) {
    require_dimension(n);
    // det of the bordered moment matrix is affine in the (1,1) entry; two
    // exact evaluations recover slope and intercept.
    RatMatrix m = product_moment_matrix(n, 1);
    m(0, 0) = 0;
    const Rational intercept = ratmat::determinant(m);
    m(0, 0) = 1;
    const Rational slope = ratmat::determinant(m) - intercept;
    if (slope == 0)
        throw std::logic_error("bordered determinant is constant; construction invariant broken");
    return -intercept / slope;
}

Rational compute_xi0_by_elimination(int n) {
    require_dimension(n);
    // Schur complement route: with the trailing block B and border column c,
    // det vanishes exactly at xi0 = c^T B^-1 c.
    const RatMatrix b = product_moment_matrix(n - 1, 3);
    RatVector border(static_cast<std::size_t>(n - 1));
    for (int i = 1; i <= n - 1; ++i)
        border[static_cast<std::size_t>(i - 1)] = rat::make(1, static_cast<long>(i + 1) * (i + 2));
    return ratmat::dot(border, ratmat::solve(b, border));
}

Rational threshold(int n) {
    const Rational xi0 = compute_xi0(n);
    const Rational interlacing_bound = (rat::make(1, 2) + rat::make(1, 2L * n)) * xi0 +
                                       rat::make(1, 4) - rat::make(1, 4L * n);
    return std::max(xi0, interlacing_bound);
}

Rational default_a_n(int n) {
    require_dimension(n);
    const RatMatrix pt = reduced_matrix(n);
    const RatVector vp = ratmat::solve(pt, d_prime(n));
    const RatVector vpp = ratmat::solve(pt, d_pprime(n));
    if (vp[0] == 0)
        throw std::logic_error("normalized C(1,1) does not depend on a_n; construction invariant broken");
    // Solve (normalized C11)(a_n) = 2 * threshold on the affine expression.
    const Rational target = 2 * threshold(n);
    return tilde_to_a_n(n, (target - vpp[0]) / vp[0]);
}

ValidityReport validate_parameters(const SynthesisParams& params) {
    require_dimension(params.n);
    if (params.d <= 0) throw std::invalid_argument("control bound d must be positive");
    if (params.c_scale <= 0) throw std::invalid_argument("c_scale must be positive");

    const int n = params.n;
    ValidityReport report;
    report.n = n;
    report.a_n_defaulted = !params.a_n.has_value();
    report.a_n = params.a_n.has_value() ? *params.a_n : default_a_n(n);
    report.c_scale = params.c_scale;
    report.xi0 = compute_xi0(n);
    report.threshold = threshold(n);

    const ReducedSolution sol = solve_reduced_system(n, report.a_n);
    report.normalized_c11 = sol.c0_ratio;
    report.first_C_entry = sol.c0_ratio * moment_scale(n) * params.c_scale;
    report.threshold_ok = report.normalized_c11 > report.threshold;

    const RatMatrix c = build_C(n, report.a_n, params.c_scale);
    report.C_pd = ratmat::is_positive_definite(c);
    report.C1_pd = ratmat::is_positive_definite(dilation_weighted(c));
    report.rank_P = ratmat::rank(build_P(n));

    const RatVector a = build_gain_vector(n, report.a_n);
    if (ratmat::determinant(c) != 0) {
        const auto [f, f_inv] = compute_F(n, c);
        report.F_pd = ratmat::is_positive_definite(f);
        report.FHF_pd = ratmat::is_positive_definite(dilation_weighted(f));
        report.lyapunov_residual = freeze_lyapunov_residual(f, a);
    } else {
        report.F_pd = false;
        report.FHF_pd = false;
        report.lyapunov_residual = std::numeric_limits<double>::quiet_NaN();
    }
    return report;
}

std::pair<RatMatrix, RatMatrix> compute_F(int n, const RatMatrix& C) {
    require_dimension(n);
    if (C.rows() != n || C.cols() != n) throw std::invalid_argument("C dimension mismatch");
    const RatMatrix dn = dn_matrix(n);
    const RatMatrix f_inv = dn * C * dn;
    RatMatrix f;
    try {
        f = ratmat::inverse(f_inv);
    } catch (const std::domain_error&) {
        throw std::domain_error("C is singular: F does not exist for these parameters");
    }
    return {f, f_inv};
}

Rational max_a0(const RatMatrix& F_inv, const RatVector& a, const Rational& d) {
    if (d <= 0) throw std::invalid_argument("control bound d must be positive");
    const Rational quad = ratmat::dot(ratmat::mat_vec(F_inv, a), a);
    if (quad <= 0)
        throw std::logic_error("(F^-1 a, a) must be positive for positive-definite F");
    return d * d / (2 * quad);
}

Rational lyapunov_residual_exact(const RatMatrix& F, const RatVector& a) {
    const RatMatrix m = closed_loop_shifted(a);
    return (F * m + m.transpose() * F).max_abs_entry();
}

double lyapunov_residual(const ControllerSpec& spec) {
    // The identity reads F(A0+b0 a^T) + (A0+b0 a^T)^T F = -(F - FH - HF);
    // both cached matrices are frozen doubles, so their sum is the honest
    // floating-point residual.
    return (spec.lyap_sym + spec.slope_form).cwiseAbs().maxCoeff();
}

ControllerSpec synthesize(const SynthesisParams& params) {
    ValidityReport report = validate_parameters(params);
    if (!report.pass()) {
        std::ostringstream msg;
        msg << "synthesis rejected for n=" << params.n << ":";
        for (const auto& id : report.failures()) {
            msg << " [" << id << "]";
            if (id == "c11-threshold")
                msg << " normalized C(1,1) = " << report.normalized_c11.get_str()
                    << " must strictly exceed " << report.threshold.get_str();
        }
        throw SynthesisError(msg.str(), std::move(report));
    }

    ExactControllerData data;
    data.n = params.n;
    data.d = params.d;
    data.a_n = report.a_n;
    data.c_scale = params.c_scale;
    data.xi0 = report.xi0;
    data.threshold = report.threshold;
    data.a = build_gain_vector(params.n, report.a_n);
    data.C = build_C(params.n, report.a_n, params.c_scale);
    auto [f, f_inv] = compute_F(params.n, data.C);
    data.F = std::move(f);
    data.F_inv = std::move(f_inv);
    data.a0_max = max_a0(data.F_inv, data.a, params.d);
    data.a0 = params.a0.has_value() ? *params.a0 : data.a0_max;
    if (data.a0 <= 0 || data.a0 > data.a0_max)
        throw std::invalid_argument("a0 = " + data.a0.get_str() + " outside the admissible range (0, " +
                                    data.a0_max.get_str() + "]");
    data.control_sup_sq = 2 * data.a0 * ratmat::dot(ratmat::mat_vec(data.F_inv, data.a), data.a);

    if (lyapunov_residual_exact(data.F, data.a) != 0)
        throw std::logic_error("exact design identity violated; construction invariant broken");

    return freeze_controller(data);
}

}  // namespace cfsyn::synthesis
