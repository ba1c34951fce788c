#include "spike/fluctuation.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "spike/errors.hpp"

namespace spike {

namespace {

void require_off_support(double rho, const SpectralLaw& law) {
    if (!law.is_off_support({rho, 0.0})) {
        throw DomainError("rho = " + std::to_string(rho) + " lies on the support");
    }
}

}  // namespace

Mat2 d_matrix(double rho, const SpectralLaw& law) {
    require_off_support(rho, law);
    const double h = law.h(rho);
    const double h1 = law.h_prime(rho);
    const double h2 = law.h_second(rho);
    Mat2 d;
    d << h * (1.0 + h) * h2 / (h1 * h1 * h1), -h * (1.0 + h) / (h1 * h1),
        -rho / h1, 0.0;
    return d;
}

Mat2 r_matrix(double rho, const SpectralLaw& law) {
    require_off_support(rho, law);
    const cplx z{rho, 0.0};
    const double m0 = law.stieltjes(z, 0).real();
    const double m1 = law.stieltjes(z, 1).real();
    const double m2 = law.stieltjes(z, 2).real();
    const double m3 = law.stieltjes(z, 3).real();
    const double off = m2 / 2.0 - m0 * m1;
    Mat2 r;
    r << m1 - m0 * m0, off,
        off, m3 / 6.0 - m1 * m1;
    return r;
}

Mat2 c_matrix_mp(double omega, double c) {
    if (!separation_check_mp(omega, c)) {
        const Edges e = mp_edges(c);
        throw SpikeNotSeparated(omega, omega > 0.0 ? e.upper : e.lower);
    }
    const double w = omega;
    const double q = (1.0 + w) * (1.0 + w);
    const double cw = (c + w) * (c + w);
    const double c11 = c * c * q / (cw * (w * w - c)) * (c * q / cw + 1.0);
    const double c12 = q * (1.0 + w) * c * c / (cw * w);
    const double c22 = c * q * (w * w - c) / (w * w);
    Mat2 m;
    m << c11, c12,
        c12, c22;
    return m;
}

FluctuationLaw FluctuationLaw::from_law(double omega, const SpectralLaw& law) {
    FluctuationLaw f;
    f.rho = rho_of_omega_general(omega, law);
    f.zeta = zeta_general(f.rho, law);
    f.D = d_matrix(f.rho, law);
    f.R = r_matrix(f.rho, law);
    f.C = f.D * f.R * f.D.transpose();
    f.C(1, 0) = f.C(0, 1) = 0.5 * (f.C(0, 1) + f.C(1, 0));
    return f;
}

FluctuationLaw FluctuationLaw::marchenko_pastur(double omega, double c) {
    const MarchenkoPastur law(c);
    FluctuationLaw f;
    f.rho = rho_of_omega_mp(omega, c);
    f.zeta = zeta_mp(omega, c);
    f.D = d_matrix(f.rho, law);
    f.R = r_matrix(f.rho, law);
    f.C = c_matrix_mp(omega, c);
    return f;
}

Mat2 psd_sqrt(const Mat2& m) {
    Eigen::SelfAdjointEigenSolver<Mat2> es(m);
    Eigen::Vector2d ev = es.eigenvalues();
    for (int i = 0; i < 2; ++i) {
        if (ev(i) < -1e-10) {
            throw DomainError("covariance is not positive semidefinite (eigenvalue " +
                              std::to_string(ev(i)) + ")");
        }
        ev(i) = std::sqrt(std::max(ev(i), 0.0));
    }
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXcd sample_gue(int j, Rng& rng) {
    if (j < 1) throw DomainError("GUE dimension must be >= 1");
    std::normal_distribution<double> nd;
    Eigen::MatrixXcd m(j, j);
    for (int col = 0; col < j; ++col) {
        m(col, col) = nd(rng);
        for (int row = 0; row < col; ++row) {
            m(row, col) = complex_normal(rng);
            m(col, row) = std::conj(m(row, col));
        }
    }
    return m;
}

JointFluctuation sample_joint_fluctuation(const SpikeDescriptor& spike, const SpectralLaw& law,
                                          Rng& rng) {
    const double rho = rho_of_omega_general(spike.omega, law);
    const Mat2 d = d_matrix(rho, law);
    const Mat2 s = psd_sqrt(d * r_matrix(rho, law) * d.transpose());

    const Eigen::MatrixXcd m1 = sample_gue(spike.multiplicity, rng);
    const Eigen::MatrixXcd m2 = sample_gue(spike.multiplicity, rng);

    JointFluctuation out;
    out.G = s(0, 0) * m1 + s(0, 1) * m2;
    const Eigen::MatrixXcd k = s(1, 0) * m1 + s(1, 1) * m2;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(k, Eigen::EigenvaluesOnly);
    out.L = es.eigenvalues().reverse();
    return out;
}

double gaussian_logpdf(const Eigen::VectorXd& x, const Eigen::MatrixXd& cov) {
    if (cov.rows() != x.size() || cov.cols() != x.size()) {
        throw DomainError("covariance shape does not match the point");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    const Eigen::VectorXd ev = es.eigenvalues();
    if (ev.minCoeff() <= 0.0 || ev.maxCoeff() / ev.minCoeff() > 1e12) {
        throw DomainError("singular covariance in Gaussian density");
    }
    const Eigen::VectorXd y = es.eigenvectors().transpose() * x;
    const double quad = (y.array().square() / ev.array()).sum();
    const double logdet = ev.array().log().sum();
    const double dim = static_cast<double>(x.size());
    return -0.5 * quad - 0.5 * logdet - 0.5 * dim * std::log(2.0 * std::numbers::pi);
}

}  // namespace spike
