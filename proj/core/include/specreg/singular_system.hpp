#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "specreg/dense_matrix.hpp"

namespace specreg {

/// Read-only view of `count` orthonormal columns of length `dim`, stored
/// column-major (column n is contiguous).
struct ColumnSet {
    std::size_t dim = 0;
    std::size_t count = 0;
    std::span<const double> data;

    std::span<const double> column(std::size_t n) const { return data.subspan(n * dim, dim); }
};

/// Discrete singular system {sigma_n; u_n, v_n} of A : X -> Y with
/// A u_n = sigma_n v_n. u_n live in X (length = cols of A), v_n in Y.
/// Immutable after construction.
class SingularSystem {
public:
    SingularSystem() = default;
    /// `u` and `v` are column-major with `sigma.size()` columns each.
    SingularSystem(std::vector<double> sigma, std::size_t dim_x, std::vector<double> u,
                   std::size_t dim_y, std::vector<double> v);

    std::size_t n_modes() const noexcept { return sigma_.size(); }
    std::size_t dim_x() const noexcept { return dim_x_; }
    std::size_t dim_y() const noexcept { return dim_y_; }

    std::span<const double> sigma() const noexcept { return sigma_; }
    double sigma(std::size_t n) const { return sigma_[n]; }
    std::span<const double> u(std::size_t n) const { return {u_.data() + n * dim_x_, dim_x_}; }
    std::span<const double> v(std::size_t n) const { return {v_.data() + n * dim_y_, dim_y_}; }

    ColumnSet x_basis() const noexcept { return {dim_x_, n_modes(), u_}; }
    ColumnSet y_basis() const noexcept { return {dim_y_, n_modes(), v_}; }

    /// Swaps the roles of X and Y: the singular system of A^T.
    SingularSystem transposed() const;

    friend bool operator==(const SingularSystem&, const SingularSystem&) = default;

private:
    std::vector<double> sigma_;
    std::size_t dim_x_ = 0;
    std::vector<double> u_;
    std::size_t dim_y_ = 0;
    std::vector<double> v_;
};

struct SvdOptions {
    /// Modes with sigma_n <= rank_tol * sigma_1 are dropped. The effective
    /// tolerance is never below max(rows, cols) * machine epsilon.
    double rank_tol = 0.0;
    /// Relative off-diagonal threshold that ends the Jacobi sweeps.
    double convergence_tol = 1e-12;
    int max_sweeps = 80;
};

/// Largest supported Gram dimension min(rows, cols).
inline constexpr std::size_t kMaxGramDim = 4096;

/// Singular system via one-sided (Hestenes) Jacobi with cyclic sweeps.
/// Each u_n is signed so its first significant entry is positive.
SingularSystem compute_svd(const DenseMatrix& a, const SvdOptions& options = {});
SingularSystem compute_svd(const DenseMatrix& a, double rank_tol);

/// <x, u_n> for every mode.
Vector x_coefficients(const SingularSystem& sys, std::span<const double> x);
/// <y, v_n> for every mode.
Vector y_coefficients(const SingularSystem& sys, std::span<const double> y);
/// sum_n c_n u_n
Vector synthesize_x(const SingularSystem& sys, std::span<const double> coeffs);
/// sum_n c_n v_n
Vector synthesize_y(const SingularSystem& sys, std::span<const double> coeffs);

/// sum_n sigma_n <x, u_n> v_n; the null-space component of x is annihilated.
Vector apply_forward(const SingularSystem& sys, std::span<const double> x);
/// sum_n <x, u_n> u_n, the orthogonal projection onto N(A)^perp.
Vector project_row_space(const SingularSystem& sys, std::span<const double> x);

/// V diag(sigma) U^T, the matrix represented by the retained modes.
DenseMatrix reconstruct_matrix(const SingularSystem& sys);

/// Binary `.svdsys` container: magic, version, dimensions, little-endian f64.
void save_system(const SingularSystem& sys, const std::filesystem::path& path);
SingularSystem load_system(const std::filesystem::path& path);

std::vector<unsigned char> encode_system(const SingularSystem& sys);
SingularSystem decode_system(std::span<const unsigned char> bytes);

}  // namespace specreg
