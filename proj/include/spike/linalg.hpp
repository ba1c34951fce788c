#pragma once

#include <functional>

#include <Eigen/Dense>

namespace spike {

/// f(A) = U diag(f(lambda_i)) U* for Hermitian A.
Eigen::MatrixXcd hermitian_function(const Eigen::MatrixXcd& a, const std::function<double(double)>& f);

/// Real symmetric variant.
Eigen::MatrixXd symmetric_function(const Eigen::MatrixXd& a, const std::function<double(double)>& f);

struct PartialEigen {
    Eigen::VectorXd values;   // all eigenvalues, decreasing
    Eigen::MatrixXcd top;     // eigenvectors of values[0 .. top-1]
    Eigen::MatrixXcd bottom;  // eigenvectors of values[N-bottom .. N-1], same order
};

/// Hermitian eigendecomposition returning every eigenvalue but only the
/// requested extreme eigenvectors. Only the lower triangle of `a` is read.
/// Tridiagonal reduction, all eigenvalues from the tridiagonal, MRRR for the
/// selected vectors, then back-transformation of those vectors only.
PartialEigen hermitian_partial_eigen(Eigen::MatrixXcd a, int top, int bottom);

}  // namespace spike
