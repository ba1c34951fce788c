#pragma once

#include <Eigen/Dense>

#include "spike/random.hpp"
#include "spike/spectral_law.hpp"
#include "spike/spike_algebra.hpp"

namespace spike {

using Mat2 = Eigen::Matrix2d;

/// Second-order law of one separated spike: outlier location, projection
/// limit, and the D, R, C = D R D^T matrices governing the joint fluctuations
/// of (projection, eigenvalue).
struct FluctuationLaw {
    double rho = 0.0;
    double zeta = 0.0;
    Mat2 D = Mat2::Zero();
    Mat2 R = Mat2::Zero();
    Mat2 C = Mat2::Zero();

    /// Built from the general-law formulas (root finding for rho).
    static FluctuationLaw from_law(double omega, const SpectralLaw& law);
    /// Marchenko-Pastur closed forms.
    static FluctuationLaw marchenko_pastur(double omega, double c);
};

Mat2 d_matrix(double rho, const SpectralLaw& law);
Mat2 r_matrix(double rho, const SpectralLaw& law);

/// Closed-form covariance of (V, L) for the Marchenko-Pastur law.
Mat2 c_matrix_mp(double omega, double c);

/// Symmetric PSD square root of a 2x2 symmetric matrix. Eigenvalues in
/// [-1e-10, 0) are clipped; anything more negative throws DomainError.
Mat2 psd_sqrt(const Mat2& m);

/// j x j GUE matrix: real N(0,1) diagonal, complex upper entries with
/// E|x|^2 = 1.
Eigen::MatrixXcd sample_gue(int j, Rng& rng);

struct JointFluctuation {
    Eigen::MatrixXcd G;  // projection fluctuation, Hermitian j x j
    Eigen::VectorXd L;   // eigenvalue fluctuations, decreasing
};

/// Draws ((D R D^T)^{1/2} kron I_j) [M1; M2] for independent GUE M1, M2.
JointFluctuation sample_joint_fluctuation(const SpikeDescriptor& spike, const SpectralLaw& law,
                                          Rng& rng);

/// log of the zero-mean multivariate normal density with covariance `cov`.
double gaussian_logpdf(const Eigen::VectorXd& x, const Eigen::MatrixXd& cov);

}  // namespace spike
