#include "cfsyn/rat_matrix.hpp"

#include <stdexcept>
#include <utility>

namespace cfsyn {

RatMatrix::RatMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, Rational(0)) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix dimension");
}

RatMatrix RatMatrix::identity(int n) {
    RatMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

RatMatrix RatMatrix::transpose() const {
    RatMatrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

bool RatMatrix::is_symmetric() const {
    if (rows_ != cols_) return false;
    for (int i = 0; i < rows_; ++i)
        for (int j = i + 1; j < cols_; ++j)
            if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
}

Rational RatMatrix::max_abs_entry() const {
    Rational best(0);
    for (const auto& q : data_) {
        Rational a = abs(q);
        if (a > best) best = a;
    }
    return best;
}

RatMatrix operator+(const RatMatrix& a, const RatMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("shape mismatch");
    RatMatrix r(a.rows_, a.cols_);
    for (std::size_t k = 0; k < a.data_.size(); ++k) r.data_[k] = a.data_[k] + b.data_[k];
    return r;
}

RatMatrix operator-(const RatMatrix& a, const RatMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("shape mismatch");
    RatMatrix r(a.rows_, a.cols_);
    for (std::size_t k = 0; k < a.data_.size(); ++k) r.data_[k] = a.data_[k] - b.data_[k];
    return r;
}

RatMatrix operator*(const RatMatrix& a, const RatMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("shape mismatch");
    RatMatrix r(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
        for (int k = 0; k < a.cols_; ++k) {
            const Rational& aik = a(i, k);
            if (aik == 0) continue;
            for (int j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

RatMatrix operator*(const Rational& s, const RatMatrix& a) {
    RatMatrix r(a.rows_, a.cols_);
    for (std::size_t k = 0; k < a.data_.size(); ++k) r.data_[k] = s * a.data_[k];
    return r;
}

bool operator==(const RatMatrix& a, const RatMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

namespace ratmat {
namespace {

// Row-echelon elimination in place; returns {rank, determinant} where the
// determinant is meaningful only for square input.
std::pair<int, Rational> eliminate(RatMatrix& m) {
    const int rows = m.rows(), cols = m.cols();
    Rational det(1);
    int rank = 0;
    int sign = 1;
    for (int col = 0; col < cols && rank < rows; ++col) {
        int pivot = -1;
        for (int r = rank; r < rows; ++r)
            if (m(r, col) != 0) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        if (pivot != rank) {
            for (int j = 0; j < cols; ++j) std::swap(m(pivot, j), m(rank, j));
            sign = -sign;
        }
        const Rational p = m(rank, col);
        det *= p;
        for (int r = rank + 1; r < rows; ++r) {
            if (m(r, col) == 0) continue;
            const Rational factor = m(r, col) / p;
            for (int j = col; j < cols; ++j) m(r, j) -= factor * m(rank, j);
        }
        ++rank;
    }
    if (rows == cols && rank < rows) det = 0;
    if (sign < 0) det = -det;
    return {rank, det};
}

}  // namespace

Rational determinant(const RatMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("determinant of non-square matrix");
    if (m.rows() == 0) return Rational(1);
    RatMatrix work = m;
    return eliminate(work).second;
}

int rank(const RatMatrix& m) {
    RatMatrix work = m;
    return eliminate(work).first;
}

RatMatrix inverse(const RatMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("inverse of non-square matrix");
    const int n = m.rows();
    // Gauss-Jordan on [m | I].
    RatMatrix aug(n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) aug(i, j) = m(i, j);
        aug(i, n + i) = 1;
    }
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int r = col; r < n; ++r)
            if (aug(r, col) != 0) {
                pivot = r;
                break;
            }
        if (pivot < 0) throw std::domain_error("singular matrix");
        if (pivot != col)
            for (int j = 0; j < 2 * n; ++j) std::swap(aug(pivot, j), aug(col, j));
        const Rational p = aug(col, col);
        for (int j = 0; j < 2 * n; ++j) aug(col, j) /= p;
        for (int r = 0; r < n; ++r) {
            if (r == col || aug(r, col) == 0) continue;
            const Rational factor = aug(r, col);
            for (int j = 0; j < 2 * n; ++j) aug(r, j) -= factor * aug(col, j);
        }
    }
    RatMatrix inv(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
    return inv;
}

RatVector solve(const RatMatrix& a, const RatVector& b) {
    if (a.rows() != a.cols() || static_cast<int>(b.size()) != a.rows())
        throw std::invalid_argument("shape mismatch in solve");
    const int n = a.rows();
    RatMatrix aug(n, n + 1);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) aug(i, j) = a(i, j);
        aug(i, n) = b[static_cast<std::size_t>(i)];
    }
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int r = col; r < n; ++r)
            if (aug(r, col) != 0) {
                pivot = r;
                break;
            }
        if (pivot < 0) throw std::domain_error("singular matrix");
        if (pivot != col)
            for (int j = 0; j <= n; ++j) std::swap(aug(pivot, j), aug(col, j));
        const Rational p = aug(col, col);
        for (int r = col + 1; r < n; ++r) {
            if (aug(r, col) == 0) continue;
            const Rational factor = aug(r, col) / p;
            for (int j = col; j <= n; ++j) aug(r, j) -= factor * aug(col, j);
        }
    }
    RatVector x(static_cast<std::size_t>(n));
    for (int i = n - 1; i >= 0; --i) {
        Rational s = aug(i, n);
        for (int j = i + 1; j < n; ++j) s -= aug(i, j) * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] = s / aug(i, i);
    }
    return x;
}

std::vector<Rational> leading_principal_minors(const RatMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("minors of non-square matrix");
    const int n = m.rows();
    std::vector<Rational> minors;
    minors.reserve(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
        RatMatrix sub(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) sub(i, j) = m(i, j);
        minors.push_back(determinant(sub));
    }
    return minors;
}

bool is_positive_definite(const RatMatrix& m) {
    if (!m.is_symmetric()) return false;
    for (const Rational& minor : leading_principal_minors(m))
        if (minor <= 0) return false;
    return true;
}

RatVector mat_vec(const RatMatrix& m, const RatVector& v) {
    if (static_cast<int>(v.size()) != m.cols()) throw std::invalid_argument("shape mismatch");
    RatVector r(static_cast<std::size_t>(m.rows()), Rational(0));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r[static_cast<std::size_t>(i)] += m(i, j) * v[static_cast<std::size_t>(j)];
    return r;
}

Rational dot(const RatVector& a, const RatVector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("shape mismatch");
    Rational s(0);
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace ratmat
}  // namespace cfsyn
