#pragma once
// Test-side reference computations. None of these call into the library
// except for plain data containers.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "specreg/dense_matrix.hpp"
#include "specreg/rng.hpp"

namespace oracle {

/// Singular values of a 2x2 matrix from the characteristic polynomial of
/// A^T A: s^2 = (t +- sqrt(t^2 - 4 d)) / 2 with t = trace, d = det.
inline std::array<double, 2> singular_values_2x2(double a, double b, double c, double d) {
    const double p = a * a + c * c;  // (A^T A)_{11}
    const double q = a * b + c * d;  // (A^T A)_{12}
    const double r = b * b + d * d;  // (A^T A)_{22}
    const double t = p + r;
    const double det = p * r - q * q;
    const double disc = std::sqrt(t * t - 4.0 * det);
    return {std::sqrt((t + disc) / 2.0), std::sqrt((t - disc) / 2.0)};
}

/// Chord length of the line {x cos(theta) + y sin(theta) = s} through the
/// square [-h, h]^2 via Liang-Barsky clipping of the parametrization
/// p(t) = s (cos, sin) + t (-sin, cos).
inline double chord_through_square(double theta, double s, double h) {
    const double c = std::cos(theta), sn = std::sin(theta);
    const double px = s * c, py = s * sn, dx = -sn, dy = c;
    double t0 = -1e300, t1 = 1e300;
    auto clip = [&](double p, double d) {
        if (std::abs(d) < 1e-300) return std::abs(p) <= h;
        double a = (-h - p) / d, b = (h - p) / d;
        if (a > b) std::swap(a, b);
        t0 = std::max(t0, a);
        t1 = std::min(t1, b);
        return true;
    };
    if (!clip(px, dx) || !clip(py, dy)) return 0.0;
    return std::max(0.0, t1 - t0);
}

/// Length of the same line inside pixel (row, col) of a side x side image on
/// [-side/2, side/2]^2 (row 0 at the top), by midpoint sampling with `steps`
/// samples along the chord. Accuracy about chord / steps.
inline double pixel_weight_sampled(double theta, double s, std::size_t side, std::size_t row, std::size_t col,
                                   std::size_t steps) {
    const double h = static_cast<double>(side) / 2.0;
    const double c = std::cos(theta), sn = std::sin(theta);
    const double L = 2.0 * h * std::sqrt(2.0);
    const double dt = 2.0 * L / static_cast<double>(steps);
    const double x_lo = -h + static_cast<double>(col), x_hi = x_lo + 1.0;
    const double y_hi = h - static_cast<double>(row), y_lo = y_hi - 1.0;
    double len = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = -L + (static_cast<double>(k) + 0.5) * dt;
        const double x = s * c - t * sn, y = s * sn + t * c;
        if (x >= x_lo && x < x_hi && y >= y_lo && y < y_hi) len += dt;
    }
    return len;
}

/// Minimizer of f over an equispaced grid on [lo, hi].
inline double grid_argmin(const std::function<double(double)>& f, double lo, double hi, std::size_t points) {
    double best_x = lo, best = f(lo);
    for (std::size_t i = 1; i < points; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        const double v = f(x);
        if (v < best) {
            best = v;
            best_x = x;
        }
    }
    return best_x;
}

inline specreg::DenseMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    specreg::CounterRng rng(seed, specreg::Stream::test_vector, 0);
    specreg::DenseMatrix a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) a(i, j) = rng.gaussian();
    return a;
}

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed, std::uint64_t index = 0) {
    specreg::CounterRng rng(seed, specreg::Stream::test_vector, index + 1000);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.gaussian();
    return v;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace oracle
