#include "spike/linalg.hpp"

#include <algorithm>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <lapacke.h>

#include "spike/errors.hpp"

namespace spike {

Eigen::MatrixXcd hermitian_function(const Eigen::MatrixXcd& a, const std::function<double(double)>& f) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);
    Eigen::VectorXd fv = es.eigenvalues().unaryExpr(f);
    return es.eigenvectors() * fv.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::MatrixXd symmetric_function(const Eigen::MatrixXd& a, const std::function<double(double)>& f) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    Eigen::VectorXd fv = es.eigenvalues().unaryExpr(f);
    return es.eigenvectors() * fv.asDiagonal() * es.eigenvectors().transpose();
}

namespace {

void check(lapack_int info, const char* routine) {
    if (info != 0) {
        throw DomainError(std::string(routine) + " failed with info=" + std::to_string(info));
    }
}

// Eigenvectors il..iu (1-based, ascending order) of the tridiagonal (d, e).
Eigen::MatrixXd tridiagonal_vectors(const Eigen::VectorXd& d, const Eigen::VectorXd& e, int il, int iu) {
    const lapack_int n = static_cast<lapack_int>(d.size());
    Eigen::VectorXd dd = d;
    Eigen::VectorXd ee(n);
    ee.head(n - 1) = e;
    ee(n - 1) = 0.0;
    const int k = iu - il + 1;
    Eigen::VectorXd w(n);
    Eigen::MatrixXd z(n, k);
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(k));
    lapack_int found = 0;
    lapack_logical tryrac = 1;
    check(LAPACKE_dstemr(LAPACK_COL_MAJOR, 'V', 'I', n, dd.data(), ee.data(), 0.0, 0.0, il, iu, &found,
                         w.data(), z.data(), n, k, support.data(), &tryrac),
          "dstemr");
    if (found != k) throw DomainError("dstemr returned an unexpected number of eigenpairs");
    return z;
}

}  // namespace

PartialEigen hermitian_partial_eigen(Eigen::MatrixXcd a, int top, int bottom) {
    const lapack_int n = static_cast<lapack_int>(a.rows());
    if (a.cols() != n || n == 0) throw DomainError("hermitian_partial_eigen needs a square nonempty matrix");
    top = std::clamp(top, 0, static_cast<int>(n));
    bottom = std::clamp(bottom, 0, static_cast<int>(n));

    PartialEigen out;
    if (n == 1) {
        out.values = Eigen::VectorXd::Constant(1, a(0, 0).real());
        out.top = Eigen::MatrixXcd::Ones(1, top);
        out.bottom = Eigen::MatrixXcd::Ones(1, bottom);
        return out;
    }

    auto* ap = reinterpret_cast<lapack_complex_double*>(a.data());
    Eigen::VectorXd d(n), e(n - 1);
    std::vector<lapack_complex_double> tau(static_cast<std::size_t>(n - 1));
    check(LAPACKE_zhetrd(LAPACK_COL_MAJOR, 'L', n, ap, n, d.data(), e.data(), tau.data()), "zhetrd");

    Eigen::VectorXd vals = d;
    Eigen::VectorXd off = e;
    check(LAPACKE_dsterf(n, vals.data(), off.data()), "dsterf");
    out.values = vals.reverse();

    auto back_transform = [&](const Eigen::MatrixXd& z) {
        Eigen::MatrixXcd c = z.cast<std::complex<double>>();
        const lapack_int k = static_cast<lapack_int>(c.cols());
        check(LAPACKE_zunmtr(LAPACK_COL_MAJOR, 'L', 'L', 'N', n, k, ap, n, tau.data(),
                             reinterpret_cast<lapack_complex_double*>(c.data()), n),
              "zunmtr");
        return c;
    };

    if (top > 0) {
        // Ascending indices n-top+1..n; flip to decreasing.
        const Eigen::MatrixXd z = tridiagonal_vectors(d, e, n - top + 1, n);
        out.top = back_transform(z.rowwise().reverse());
    } else {
        out.top.resize(n, 0);
    }
    if (bottom > 0) {
        const Eigen::MatrixXd z = tridiagonal_vectors(d, e, 1, bottom);
        out.bottom = back_transform(z.rowwise().reverse());
    } else {
        out.bottom.resize(n, 0);
    }
    return out;
}

}  // namespace spike
