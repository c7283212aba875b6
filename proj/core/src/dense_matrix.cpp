#include "specreg/dense_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "specreg/error.hpp"

namespace specreg {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionError("matrix entry count " + std::to_string(data_.size()) + " != " +
                             std::to_string(rows_) + " x " + std::to_string(cols_));
    }
    require_finite();
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> diag) {
    DenseMatrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    m.require_finite();
    return m;
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

Vector DenseMatrix::apply(std::span<const double> x) const {
    if (x.size() != cols_)
        throw DimensionError("apply: vector length " + std::to_string(x.size()) + " != cols " +
                             std::to_string(cols_));
    Vector y(rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) y[r] = dot(row(r), x);
    return y;
}

Vector DenseMatrix::apply_transpose(std::span<const double> y) const {
    if (y.size() != rows_)
        throw DimensionError("apply_transpose: vector length " + std::to_string(y.size()) +
                             " != rows " + std::to_string(rows_));
    Vector x(cols_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) axpy(y[r], row(r), x);
    return x;
}

double DenseMatrix::max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

double DenseMatrix::frobenius_norm() const noexcept { return norm2(data_); }

void DenseMatrix::require_finite() const {
    for (std::size_t i = 0; i < data_.size(); ++i) {
        if (!std::isfinite(data_[i])) {
            throw InvalidArgument("non-finite matrix entry at (" + std::to_string(i / cols_) + ", " +
                                  std::to_string(i % cols_) + ")");
        }
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace specreg
