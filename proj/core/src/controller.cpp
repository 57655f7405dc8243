#include "cfsyn/controller.hpp"

#include <cmath>
#include <stdexcept>

namespace cfsyn {

namespace {

Eigen::MatrixXd freeze_matrix(const RatMatrix& m) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out(i, j) = rat::to_double(m(i, j));
    return out;
}

}  // namespace

ControllerSpec freeze_controller(const ExactControllerData& data) {
    const int n = data.n;
    if (n < 2) throw std::invalid_argument("controller dimension must be at least 2");
    if (static_cast<int>(data.a.size()) != n || data.F.rows() != n || data.F_inv.rows() != n ||
        data.C.rows() != n)
        throw std::invalid_argument("inconsistent controller data dimensions");

    ControllerSpec spec;
    spec.n = n;
    spec.exact = data;
    spec.d = rat::to_double(data.d);
    spec.a0 = rat::to_double(data.a0);
    spec.a.resize(n);
    for (int i = 0; i < n; ++i) spec.a(i) = rat::to_double(data.a[static_cast<std::size_t>(i)]);
    spec.F = freeze_matrix(data.F);
    spec.F_inv = freeze_matrix(data.F_inv);
    spec.C = freeze_matrix(data.C);

    // The supremum of |u| along trajectories. When a0 sits exactly at its
    // maximum the square is d^2 by construction; return d itself so the bound
    // is exact rather than sqrt(rounded d^2).
    if (data.a0 == data.a0_max)
        spec.control_sup = spec.d;
    else
        spec.control_sup = std::sqrt(rat::to_double(data.control_sup_sq));

    spec.dn.resize(n);
    spec.h.resize(n);
    double fact = 1.0;
    for (int i = 1; i <= n; ++i) {
        if (i > 1) fact *= static_cast<double>(i - 1);
        spec.dn(i - 1) = ((i - 1) % 2 == 0 ? 1.0 : -1.0) / fact;
        spec.h(i - 1) = -(2.0 * i - 1.0) / 2.0;
    }

    // lyap_sym is assembled from the frozen doubles on purpose: tests use it
    // to confirm that the rounded gains still satisfy the design identity,
    // so it must not be copied from the exact side.
    Eigen::MatrixXd closed_loop = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) closed_loop(i, i - 1) = 1.0;
    closed_loop.row(0) += spec.a.transpose();
    spec.lyap_sym = spec.F * closed_loop + closed_loop.transpose() * spec.F;

    spec.slope_form.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) spec.slope_form(i, j) = spec.F(i, j) * static_cast<double>(i + j + 2);

    return spec;
}

}  // namespace cfsyn
