#pragma once

#include "cfsyn/controller.hpp"
#include "cfsyn/rat_matrix.hpp"
#include "cfsyn/rational.hpp"

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cfsyn::synthesis {

/// Free parameters of the controller family. d bounds |u|; a_n and c_scale
/// pick one member of the two-parameter gain family; a0 scales the implicit
/// time equation. Unset optionals get deterministic defaults.
struct SynthesisParams {
    int n = 0;
    Rational d = Rational(1);
    std::optional<Rational> a_n;
    Rational c_scale = Rational(1);
    std::optional<Rational> a0;
};

/// Exact solution of the reduced linear system that fixes the interior gain
/// coefficients once a_n is chosen. delta_p / delta_pp are the
/// column-replacement determinants; the solution itself comes from exact
/// elimination and the two routes agree identically.
struct ReducedSolution {
    Rational delta;
    RatVector delta_p;
    RatVector delta_pp;
    Rational c0_ratio;
    RatVector a_tilde;
};

/// Exact verdicts for every admissibility condition of the construction.
/// Never throws; pass() is the conjunction the synthesizer enforces.
struct ValidityReport {
    int n = 0;
    Rational a_n;
    bool a_n_defaulted = false;
    Rational c_scale;
    Rational xi0;
    Rational first_C_entry;
    Rational threshold;
    Rational normalized_c11;  // first_C_entry / ((2n-1) 2n c_scale)
    bool C_pd = false;
    bool C1_pd = false;
    bool F_pd = false;
    bool FHF_pd = false;
    bool threshold_ok = false;
    double lyapunov_residual = 0.0;
    int rank_P = 0;

    bool pass() const;
    /// Stable ids of the violated conditions, empty when pass() is true.
    /// Ids: c11-threshold, C-positive-definite, C1-positive-definite,
    /// F-positive-definite, FHF-positive-definite, P-rank.
    std::vector<std::string> failures() const;
};

/// Thrown by synthesize() when the parameter family fails validation; carries
/// the full report so callers can name the violated condition.
class SynthesisError : public std::invalid_argument {
public:
    SynthesisError(std::string message, ValidityReport report);
    const ValidityReport& report() const { return report_; }

private:
    ValidityReport report_;
};

/// Chain-of-integrators pair: A0 with ones on the subdiagonal, b0 = e1.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> build_canonical_pair(int n);

/// s x s matrix with entries 1/(i+j+k-2) (1-based), the Hilbert matrix for
/// k = 1. Positive definite for every k >= 1.
RatMatrix hilbert_like_matrix(int s, int k);

/// s x s matrix with entries 1/((i+j+k-2)(i+j+k-1)); the moment matrix whose
/// determinants drive the reduced system and the xi0 equation.
RatMatrix product_moment_matrix(int s, int k);

/// The singular n x n system matrix of the full gain equations; determinant
/// zero, rank n-1.
RatMatrix build_P(int n);

/// The nondegenerate (n-1) x (n-1) block left after dropping the redundant
/// first equation and moving the a_n column to the right-hand side.
RatMatrix reduced_matrix(int n);

ReducedSolution solve_reduced_system(int n, const Rational& a_n);

/// Hankel matrix C of the family member (a_n, c_scale).
RatMatrix build_C(int n, const Rational& a_n, const Rational& c_scale);

/// Gain vector a = (a_1, ..., a_n); a_1 = -n(n+1)/2 always.
RatVector build_gain_vector(int n, const Rational& a_n);

/// Root of the bordered-determinant equation: the value of the normalized
/// (1,1) entry at which C loses invertibility. Uses linearity of the
/// determinant in that entry (two exact evaluations).
Rational compute_xi0(int n);

/// Same root via Schur elimination of the trailing block; used to
/// cross-check compute_xi0.
Rational compute_xi0_by_elimination(int n);

/// Admissibility threshold the normalized C(1,1) entry must strictly exceed.
Rational threshold(int n);

/// Deterministic default for a_n: normalized C(1,1) lands at exactly twice
/// the threshold (margin factor 2).
Rational default_a_n(int n);

ValidityReport validate_parameters(const SynthesisParams& params);

/// F_inv = Dn C Dn and its exact inverse F. Throws std::domain_error when C
/// is singular.
std::pair<RatMatrix, RatMatrix> compute_F(int n, const RatMatrix& C);

/// Largest admissible a0 = d^2 / (2 (F^-1 a, a)).
Rational max_a0(const RatMatrix& F_inv, const RatVector& a, const Rational& d);

/// Max-abs entry of F(A0 + b0 a^T + I/2 - H) + (A0 + b0 a^T + I/2 - H)^T F in
/// exact arithmetic; identically zero for every constructed controller.
Rational lyapunov_residual_exact(const RatMatrix& F, const RatVector& a);

/// Same residual evaluated from the frozen double-precision spec.
double lyapunov_residual(const ControllerSpec& spec);

/// Full pipeline: validate, build the exact controller, freeze. Throws
/// SynthesisError on failed validation and std::invalid_argument on a0
/// outside (0, max_a0].
ControllerSpec synthesize(const SynthesisParams& params);

}  // namespace cfsyn::synthesis
