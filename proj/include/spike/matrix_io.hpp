#pragma once

#include <filesystem>
#include <iosfwd>

#include <Eigen/Dense>

namespace spike {

enum class MatrixPrecision { complex64, complex128 };

/// "spkmat v1 <rows> <cols> complex64|complex128\n" followed by little-endian
/// interleaved (re, im) values in column-major order.
void write_matrix(std::ostream& out, const Eigen::MatrixXcd& m, MatrixPrecision p = MatrixPrecision::complex128);
void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXcd& m,
                  MatrixPrecision p = MatrixPrecision::complex128);

/// Throws IoError on a missing file, bad header or truncated data.
Eigen::MatrixXcd read_matrix(std::istream& in);
Eigen::MatrixXcd read_matrix(const std::filesystem::path& path);

}  // namespace spike
