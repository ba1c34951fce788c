#pragma once

#include <Eigen/Dense>

namespace spike {

/// Sorted sample eigenvalues of Sigma Sigma* (descending) together with the
/// eigenvectors of the top and bottom blocks needed for projections.
class SpikeSpectrum {
public:
    /// eigenvalues must be sorted decreasing. `top` holds the eigenvectors of
    /// the first top.cols() eigenvalues, `bottom` those of the last
    /// bottom.cols() eigenvalues (in the same decreasing order).
    SpikeSpectrum(Eigen::VectorXd eigenvalues, Eigen::MatrixXcd top, Eigen::MatrixXcd bottom, int samples);

    /// Spectrum of Sigma Sigma* for an N x n observation Sigma.
    static SpikeSpectrum from_observation(const Eigen::MatrixXcd& sigma, int top_vectors = 0,
                                          int bottom_vectors = 0);
    /// Spectrum of a precomputed N x N Gram matrix Sigma Sigma* (lower triangle read).
    static SpikeSpectrum from_gram(const Eigen::MatrixXcd& gram, int samples, int top_vectors = 0,
                                   int bottom_vectors = 0);

    int dimension() const { return static_cast<int>(values_.size()); }
    int samples() const { return samples_; }
    /// c_N = N / n.
    double ratio() const { return static_cast<double>(dimension()) / samples_; }

    const Eigen::VectorXd& eigenvalues() const { return values_; }
    double largest() const { return values_(0); }
    double smallest() const { return values_(values_.size() - 1); }

    /// True when eigenvectors for positions [first, first + count) are stored.
    bool has_vectors(int first, int count) const;
    /// Eigenvectors for 0-based positions [first, first + count). Throws
    /// DomainError when they were not retained.
    Eigen::MatrixXcd vectors(int first, int count) const;

    int top_count() const { return static_cast<int>(top_.cols()); }
    int bottom_count() const { return static_cast<int>(bottom_.cols()); }

private:
    Eigen::VectorXd values_;
    Eigen::MatrixXcd top_;
    Eigen::MatrixXcd bottom_;
    int samples_;
};

}  // namespace spike
