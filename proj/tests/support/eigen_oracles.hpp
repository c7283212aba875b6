#pragma once
// Dense linear-algebra oracles backed by Eigen (test-only dependency).

#include <Eigen/Dense>
#include <vector>

#include "specreg/dense_matrix.hpp"

namespace oracle {

inline Eigen::MatrixXd to_eigen(const specreg::DenseMatrix& a) {
    Eigen::MatrixXd m(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
    return m;
}

/// Singular values in non-increasing order.
inline std::vector<double> eigen_singular_values(const specreg::DenseMatrix& a) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(a));
    const auto& s = svd.singularValues();
    return std::vector<double>(s.data(), s.data() + s.size());
}

/// argmin_x 1/2 ||A x - y||^2 + 1/2 x^T W x via the normal equations
/// (A^T A + W) x = A^T y.
inline std::vector<double> tikhonov_normal_equations(const specreg::DenseMatrix& a, const std::vector<double>& y,
                                                     const Eigen::MatrixXd& w) {
    const Eigen::MatrixXd A = to_eigen(a);
    const Eigen::VectorXd Y = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
    const Eigen::MatrixXd lhs = A.transpose() * A + w;
    const Eigen::VectorXd x = lhs.ldlt().solve(A.transpose() * Y);
    return std::vector<double>(x.data(), x.data() + x.size());
}

}  // namespace oracle
