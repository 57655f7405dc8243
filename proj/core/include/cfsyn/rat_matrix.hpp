#pragma once

#include "cfsyn/rational.hpp"

#include <vector>

namespace cfsyn {

using RatVector = std::vector<Rational>;

/// Small dense matrix over exact rationals. Everything the synthesis stage
/// needs (determinants, rank, inverses, Sylvester minors) on matrices of
/// order <= ~10, where plain Gaussian elimination over mpq is exact and fast.
class RatMatrix {
public:
    RatMatrix() = default;
    RatMatrix(int rows, int cols);

    static RatMatrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Rational& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    const Rational& operator()(int i, int j) const {
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }

    RatMatrix transpose() const;
    bool is_symmetric() const;
    Rational max_abs_entry() const;

    friend RatMatrix operator+(const RatMatrix& a, const RatMatrix& b);
    friend RatMatrix operator-(const RatMatrix& a, const RatMatrix& b);
    friend RatMatrix operator*(const RatMatrix& a, const RatMatrix& b);
    friend RatMatrix operator*(const Rational& s, const RatMatrix& a);
    friend bool operator==(const RatMatrix& a, const RatMatrix& b);

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Rational> data_;
};

namespace ratmat {

Rational determinant(const RatMatrix& m);
int rank(const RatMatrix& m);

/// Exact inverse. Throws std::domain_error if the matrix is singular.
RatMatrix inverse(const RatMatrix& m);

/// Solves A x = b exactly. Throws std::domain_error if A is singular.
RatVector solve(const RatMatrix& a, const RatVector& b);

/// Determinants of the k x k leading principal submatrices, k = 1..n.
std::vector<Rational> leading_principal_minors(const RatMatrix& m);

/// Sylvester test: symmetric and all leading principal minors positive.
bool is_positive_definite(const RatMatrix& m);

RatVector mat_vec(const RatMatrix& m, const RatVector& v);
Rational dot(const RatVector& a, const RatVector& b);

}  // namespace ratmat
}  // namespace cfsyn
