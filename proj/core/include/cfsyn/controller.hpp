#pragma once

#include "cfsyn/rat_matrix.hpp"
#include "cfsyn/rational.hpp"

#include <Eigen/Dense>

namespace cfsyn {

/// Exact-arithmetic image of a synthesized controller. This is what gets
/// serialized; the double-precision ControllerSpec is derived from it by a
/// single deterministic freeze step.
struct ExactControllerData {
    int n = 0;
    Rational d;        // control bound
    Rational a0;       // scale parameter of the implicit time equation
    Rational a_n;      // free gain parameter
    Rational c_scale;  // free scale of the moment sequence
    Rational xi0;
    Rational threshold;
    Rational a0_max;         // d^2 / (2 (F^-1 a, a))
    Rational control_sup_sq; // 2 a0 (F^-1 a, a)
    RatVector a;
    RatMatrix C;
    RatMatrix F;
    RatMatrix F_inv;
};

/// Frozen double-precision controller used by the runtime (time-function
/// solver, feedback, simulator). Immutable after construction; safe to share
/// across threads.
struct ControllerSpec {
    int n = 0;
    double d = 0;
    double a0 = 0;
    Eigen::VectorXd a;
    Eigen::MatrixXd F;
    Eigen::MatrixXd F_inv;
    Eigen::MatrixXd C;
    double control_sup = 0;

    // Cached pieces of the construction, frozen once.
    Eigen::VectorXd dn;          // alternating inverse factorials
    Eigen::VectorXd h;           // weight exponents -(2i-1)/2
    Eigen::MatrixXd lyap_sym;    // F (A0 + b0 a^T) + (A0 + b0 a^T)^T F
    Eigen::MatrixXd slope_form;  // F - HF - FH, entries F_ij (i+j)

    ExactControllerData exact;
};

/// Deterministic rational -> double freeze of the full controller.
ControllerSpec freeze_controller(const ExactControllerData& data);

}  // namespace cfsyn
