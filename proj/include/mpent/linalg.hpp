#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpent/error.hpp"

namespace mpent {

using cplx = std::complex<double>;

// Dense row-major complex matrix. Small by construction: every matrix in this
// library is a local operator or a reduced density matrix.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) {
            throw std::invalid_argument("Matrix: data size does not match shape");
        }
    }
    Matrix(std::initializer_list<std::initializer_list<cplx>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw std::invalid_argument("Matrix: ragged initializer");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix diagonal(std::span<const double> d) {
        Matrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    // |v><v|
    static Matrix projector(std::span<const cplx> v) {
        Matrix m(v.size(), v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = v[i] * std::conj(v[j]);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const cplx> data() const { return data_; }

    std::vector<cplx> column(std::size_t c) const {
        std::vector<cplx> v(rows_);
        for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
        return v;
    }

    Matrix adjoint() const {
        Matrix m(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) m(c, r) = std::conj((*this)(r, c));
        return m;
    }

    Matrix transpose() const {
        Matrix m(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) m(c, r) = (*this)(r, c);
        return m;
    }

    cplx trace() const {
        cplx t = 0.0;
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& x : data_) s += std::norm(x);
        return std::sqrt(s);
    }

    // Largest |a_ij - conj(a_ji)|.
    double hermiticity_error() const {
        if (!is_square()) return INFINITY;
        double worst = 0.0;
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = r; c < cols_; ++c)
                worst = std::max(worst, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
        return worst;
    }
    bool is_hermitian(double tol = 1e-10) const { return hermiticity_error() <= tol; }

    // U^dagger U = I; rectangular U with more rows than columns is an isometry.
    bool is_isometry(double tol = 1e-9) const;

    Matrix& operator+=(const Matrix& o) {
        check_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        check_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    Matrix& operator*=(cplx s) {
        for (auto& x : data_) x *= s;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, cplx s) { return a *= s; }
    friend Matrix operator*(cplx s, Matrix a) { return a *= s; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("Matrix product: shape mismatch");
        Matrix m(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const cplx aik = a(i, k);
                if (aik == cplx{}) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) m(i, j) += aik * b(k, j);
            }
        return m;
    }

    friend std::vector<cplx> operator*(const Matrix& a, std::span<const cplx> v) {
        if (a.cols_ != v.size()) throw std::invalid_argument("Matrix-vector product: shape mismatch");
        std::vector<cplx> out(a.rows_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            cplx s = 0.0;
            for (std::size_t k = 0; k < a.cols_; ++k) s += a(i, k) * v[k];
            out[i] = s;
        }
        return out;
    }

  private:
    void check_same_shape(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("Matrix: shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

inline bool Matrix::is_isometry(double tol) const {
    if (rows_ < cols_) return false;
    const Matrix g = adjoint() * (*this);
    return (g - identity(cols_)).frobenius_norm() <= tol;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix m(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            if (aij == cplx{}) continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    m(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return m;
}

inline std::vector<cplx> kron(std::span<const cplx> a, std::span<const cplx> b) {
    std::vector<cplx> v(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) v[i * b.size() + j] = a[i] * b[j];
    return v;
}

inline cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
    if (a.size() != b.size()) throw std::invalid_argument("inner: size mismatch");
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline double norm2(std::span<const cplx> a) {
    double s = 0.0;
    for (const auto& x : a) s += std::norm(x);
    return s;
}

struct EigenSystem {
    std::vector<double> values; // descending
    Matrix vectors;             // column i belongs to values[i]; empty if not requested
};

namespace detail {

// Cyclic Jacobi with complex rotations. Each (p,q) step first removes the
// phase of h_pq with a diagonal unitary, then applies the real symmetric
// rotation that zeroes the (now real) off-diagonal pair.
inline EigenSystem jacobi(Matrix h, bool want_vectors, double off_tol, int max_sweeps) {
    const std::size_t n = h.rows();
    Matrix v = want_vectors ? Matrix::identity(n) : Matrix{};

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c)
                if (r != c) s += std::norm(h(r, c));
        return std::sqrt(s);
    };
    const double scale = std::max(1.0, h.frobenius_norm());

    int sweep = 0;
    for (; sweep < max_sweeps && off_norm() >= off_tol * scale; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx hpq = h(p, q);
                const double mag = std::abs(hpq);
                if (mag < 1e-300) continue;
                const cplx phase = hpq / mag; // e^{i phi}
                const double app = h(p, p).real();
                const double aqq = h(q, q).real();
                const double theta = (aqq - app) / (2.0 * mag);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // J = diag(1, conj(phase)) * [[c, s], [-s, c]]
                const cplx j00 = c, j01 = s;
                const cplx j10 = -s * std::conj(phase), j11 = c * std::conj(phase);

                for (std::size_t k = 0; k < n; ++k) { // H <- H J
                    const cplx hkp = h(k, p), hkq = h(k, q);
                    h(k, p) = hkp * j00 + hkq * j10;
                    h(k, q) = hkp * j01 + hkq * j11;
                }
                for (std::size_t k = 0; k < n; ++k) { // H <- J^dagger H
                    const cplx hpk = h(p, k), hqk = h(q, k);
                    h(p, k) = std::conj(j00) * hpk + std::conj(j10) * hqk;
                    h(q, k) = std::conj(j01) * hpk + std::conj(j11) * hqk;
                }
                h(p, q) = 0.0;
                h(q, p) = 0.0;
                h(p, p) = h(p, p).real();
                h(q, q) = h(q, q).real();
                if (want_vectors) {
                    for (std::size_t k = 0; k < n; ++k) {
                        const cplx vkp = v(k, p), vkq = v(k, q);
                        v(k, p) = vkp * j00 + vkq * j10;
                        v(k, q) = vkp * j01 + vkq * j11;
                    }
                }
            }
        }
    }
    if (off_norm() >= off_tol * scale * 1e3) {
        throw DomainError("hermitian_eigensystem: Jacobi did not converge");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return h(a, a).real() > h(b, b).real(); });

    EigenSystem out;
    out.values.reserve(n);
    for (auto i : order) out.values.push_back(h(i, i).real());
    if (want_vectors) {
        out.vectors = Matrix(n, n);
        for (std::size_t c = 0; c < n; ++c)
            for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
    }
    return out;
}

} // namespace detail

/// Eigen-decomposition of a Hermitian matrix, eigenvalues sorted descending.
/// Converges when the off-diagonal Frobenius norm drops below 1e-12 (relative
/// to max(1, |H|_F)).
inline EigenSystem hermitian_eigensystem(const Matrix& h, double hermitian_tol = 1e-10) {
    if (!h.is_square()) throw std::invalid_argument("hermitian_eigensystem: matrix is not square");
    if (h.hermiticity_error() > hermitian_tol) {
        throw std::invalid_argument("hermitian_eigensystem: matrix is not Hermitian within tolerance");
    }
    return detail::jacobi(h, true, 1e-12, 100);
}

inline std::vector<double> hermitian_eigenvalues(const Matrix& h, double hermitian_tol = 1e-10) {
    if (!h.is_square()) throw std::invalid_argument("hermitian_eigenvalues: matrix is not square");
    if (h.hermiticity_error() > hermitian_tol) {
        throw std::invalid_argument("hermitian_eigenvalues: matrix is not Hermitian within tolerance");
    }
    return detail::jacobi(h, false, 1e-12, 100).values;
}

} // namespace mpent
