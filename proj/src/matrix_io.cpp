#include "spike/matrix_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "spike/errors.hpp"

namespace spike {

namespace {

template <typename T>
T to_little(T v) {
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
        U u = std::bit_cast<U>(v);
        U r = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i) r = (r << 8) | ((u >> (8 * i)) & 0xff);
        return std::bit_cast<T>(r);
    }
}

template <typename T>
void write_values(std::ostream& out, const Eigen::MatrixXcd& m) {
    std::vector<T> buf;
    buf.reserve(2 * static_cast<std::size_t>(m.size()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            buf.push_back(to_little(static_cast<T>(m(i, j).real())));
            buf.push_back(to_little(static_cast<T>(m(i, j).imag())));
        }
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(T)));
}

template <typename T>
Eigen::MatrixXcd read_values(std::istream& in, Eigen::Index rows, Eigen::Index cols) {
    std::vector<T> buf(2 * static_cast<std::size_t>(rows * cols));
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(T)));
    if (in.gcount() != static_cast<std::streamsize>(buf.size() * sizeof(T))) throw IoError("matrix data is truncated");
    Eigen::MatrixXcd m(rows, cols);
    std::size_t k = 0;
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double re = to_little(buf[k++]);
            const double im = to_little(buf[k++]);
            m(i, j) = {re, im};
        }
    }
    return m;
}

}  // namespace

void write_matrix(std::ostream& out, const Eigen::MatrixXcd& m, MatrixPrecision p) {
    const bool single = p == MatrixPrecision::complex64;
    out << "spkmat v1 " << m.rows() << ' ' << m.cols() << ' ' << (single ? "complex64" : "complex128") << '\n';
    if (single) {
        write_values<float>(out, m);
    } else {
        write_values<double>(out, m);
    }
    if (!out) throw IoError("failed to write matrix");
}

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXcd& m, MatrixPrecision p) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_matrix(out, m, p);
}

Eigen::MatrixXcd read_matrix(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("missing matrix header");
    std::istringstream hs(line);
    std::string magic, version, type;
    long long rows = -1, cols = -1;
    hs >> magic >> version >> rows >> cols >> type;
    if (magic != "spkmat" || version != "v1") throw IoError("not a spkmat v1 file");
    if (rows <= 0 || cols <= 0) throw IoError("invalid matrix dimensions in header");
    std::string rest;
    if (hs >> rest) throw IoError("trailing tokens in matrix header");
    if (type == "complex64") return read_values<float>(in, rows, cols);
    if (type == "complex128") return read_values<double>(in, rows, cols);
    throw IoError("unknown element type '" + type + "'");
}

Eigen::MatrixXcd read_matrix(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open matrix file " + path.string());
    return read_matrix(in);
}

}  // namespace spike
