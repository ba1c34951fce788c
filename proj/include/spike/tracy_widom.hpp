#pragma once

#include <filesystem>
#include <span>
#include <vector>

namespace spike {

/// Tabulated CDF of the complex (beta = 2) Tracy-Widom law with monotone
/// cubic (PCHIP) interpolation between grid points.
class Tw2Table {
public:
    Tw2Table(std::vector<double> s, std::vector<double> F);

    /// Evaluates the Fredholm determinant on an even grid [lo, hi].
    static Tw2Table generate(double lo = -10.0, double hi = 6.0, double step = 0.01);

    /// Reads the "# tw2 v1 grid=<spacing>" text format. Throws IoError.
    static Tw2Table load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    /// Saturates to 0 below the grid and to 1 above it.
    double cdf(double s) const;

    /// Smallest s with cdf(s) = p, by bisection. p must lie in (1e-12, 1 - 1e-12).
    double quantile(double p) const;

    std::span<const double> grid() const { return s_; }
    std::span<const double> values() const { return F_; }
    double spacing() const;

private:
    std::vector<double> s_;
    std::vector<double> F_;
    std::vector<double> slope_;
};

/// F_2(s) = det(I - K_Airy) on L^2(s, inf), Nystrom discretization with
/// `nodes` Gauss-Legendre points on a truncated interval.
double tw2_fredholm_cdf(double s, int nodes = 80);

/// Process-wide table. Loaded from $SPIKE_TW2_TABLE if set, else from the
/// shipped data file, else generated in memory.
const Tw2Table& tw2_table();

double tw2_cdf(double s);
double tw2_quantile(double p);

}  // namespace spike
