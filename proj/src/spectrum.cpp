#include "spike/spectrum.hpp"

#include "spike/errors.hpp"
#include "spike/linalg.hpp"

namespace spike {

SpikeSpectrum::SpikeSpectrum(Eigen::VectorXd eigenvalues, Eigen::MatrixXcd top, Eigen::MatrixXcd bottom,
                             int samples)
    : values_(std::move(eigenvalues)), top_(std::move(top)), bottom_(std::move(bottom)), samples_(samples) {
    const auto N = values_.size();
    if (N == 0) throw DomainError("empty spectrum");
    if (samples_ < 1) throw DomainError("sample count must be positive");
    for (Eigen::Index i = 1; i < N; ++i) {
        if (values_(i) > values_(i - 1)) throw DomainError("eigenvalues must be sorted decreasing");
    }
    if ((top_.cols() > 0 && top_.rows() != N) || (bottom_.cols() > 0 && bottom_.rows() != N)) {
        throw DomainError("eigenvector blocks do not match the dimension");
    }
    if (top_.cols() > N || bottom_.cols() > N) throw DomainError("too many eigenvectors");
}

SpikeSpectrum SpikeSpectrum::from_observation(const Eigen::MatrixXcd& sigma, int top_vectors, int bottom_vectors) {
    const int N = static_cast<int>(sigma.rows());
    Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(N, N);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(sigma);
    return from_gram(gram, static_cast<int>(sigma.cols()), top_vectors, bottom_vectors);
}

SpikeSpectrum SpikeSpectrum::from_gram(const Eigen::MatrixXcd& gram, int samples, int top_vectors,
                                       int bottom_vectors) {
    PartialEigen pe = hermitian_partial_eigen(gram, top_vectors, bottom_vectors);
    return SpikeSpectrum(std::move(pe.values), std::move(pe.top), std::move(pe.bottom), samples);
}

bool SpikeSpectrum::has_vectors(int first, int count) const {
    const int N = dimension();
    if (first < 0 || count < 0 || first + count > N) return false;
    if (first + count <= top_count()) return true;
    return first >= N - bottom_count();
}

Eigen::MatrixXcd SpikeSpectrum::vectors(int first, int count) const {
    if (!has_vectors(first, count)) {
        throw DomainError("eigenvectors for positions " + std::to_string(first) + ".." +
                          std::to_string(first + count - 1) + " were not retained");
    }
    if (first + count <= top_count()) return top_.middleCols(first, count);
    const int offset = first - (dimension() - bottom_count());
    return bottom_.middleCols(offset, count);
}

}  // namespace spike
