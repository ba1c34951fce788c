#include "spike/spectral_law.hpp"

#include <cmath>
#include <string>

#include "spike/errors.hpp"

namespace spike {

namespace {

void require_ratio_open(double c) {
    if (!(c > 0.0 && c < 1.0)) {
        throw DomainError("ratio c must lie in (0, 1), got " + std::to_string(c));
    }
}

void require_off_support(cplx z, Edges e) {
    if (std::abs(z) <= kSupportTolerance) {
        throw DomainError("Stieltjes transform evaluated at z = 0");
    }
    if (std::abs(z.imag()) <= kSupportTolerance && z.real() >= e.lower - kSupportTolerance &&
        z.real() <= e.upper + kSupportTolerance) {
        throw DomainError("z = " + std::to_string(z.real()) + (z.imag() < 0 ? "" : "+") +
                          std::to_string(z.imag()) + "i lies on the support [" +
                          std::to_string(e.lower) + ", " + std::to_string(e.upper) + "]");
    }
}

// Analytic branch of sqrt((z-a)(z-b)) on C \ [a, b], ~ z at infinity.
cplx edge_root(cplx z, Edges e) {
    return std::sqrt(z - e.lower) * std::sqrt(z - e.upper);
}

}  // namespace

// ---------------------------------------------------------------------------

double SpectralLaw::h(double x) const { return x * stieltjes({x, 0.0}, 0).real(); }

double SpectralLaw::h_prime(double x) const {
    const cplx z{x, 0.0};
    return (stieltjes(z, 0) + x * stieltjes(z, 1)).real();
}

double SpectralLaw::h_second(double x) const {
    const cplx z{x, 0.0};
    return (2.0 * stieltjes(z, 1) + x * stieltjes(z, 2)).real();
}

double SpectralLaw::h_at_upper_edge() const {
    // h(b + d) = h(b) + k sqrt(d) + O(d): eliminate the sqrt term.
    const double b = upper_edge();
    const double d = 1e-6 * (1.0 + b);
    return 2.0 * h(b + d) - h(b + 4.0 * d);
}

double SpectralLaw::h_at_lower_edge() const {
    const double a = lower_edge();
    const double d = 1e-6 * a;
    return 2.0 * h(a - d) - h(a - 4.0 * d);
}

bool SpectralLaw::is_off_support(cplx z) const {
    const Edges e = edges();
    if (std::abs(z) <= kSupportTolerance) return false;
    return !(std::abs(z.imag()) <= kSupportTolerance && z.real() >= e.lower - kSupportTolerance &&
             z.real() <= e.upper + kSupportTolerance);
}

// ---------------------------------------------------------------------------

Edges mp_edges(double c) {
    if (!(c >= 0.0 && c <= 1.0)) {
        throw DomainError("ratio c must lie in [0, 1], got " + std::to_string(c));
    }
    const double r = std::sqrt(c);
    return {(1.0 - r) * (1.0 - r), (1.0 + r) * (1.0 + r)};
}

cplx mp_stieltjes(cplx z, double c) { return mp_stieltjes_derivative(z, c, 0); }

cplx mp_stieltjes_derivative(cplx z, double c, int order) {
    require_ratio_open(c);
    if (order < 0 || order > 3) {
        throw DomainError("Stieltjes derivative order must be 0..3");
    }
    const Edges e = mp_edges(c);
    require_off_support(z, e);

    // Root of c z m^2 - (1 - c - z) m + 1 = 0 written as 2 / (1 - c - z - s):
    // the companion root is 1 / (c z m), and this form avoids cancellation
    // both at infinity and near the origin.
    const cplx s = edge_root(z, e);
    const cplx m = 2.0 / (1.0 - c - z - s);
    if (order == 0) return m;

    // Implicit differentiation of the quadratic identity.
    const cplx A = 2.0 * c * z * m + z - 1.0 + c;
    const cplx m1 = -(c * m * m + m) / A;
    if (order == 1) return m1;

    const cplx m2 = -(4.0 * c * m * m1 + 2.0 * c * z * m1 * m1 + 2.0 * m1) / A;
    if (order == 2) return m2;

    const cplx A1 = 2.0 * c * m + 2.0 * c * z * m1 + 1.0;
    return -(6.0 * c * m1 * m1 + 4.0 * c * m * m2 + 4.0 * c * z * m1 * m2 + 2.0 * m2 + A1 * m2) / A;
}

// ---------------------------------------------------------------------------

MarchenkoPastur::MarchenkoPastur(double c) : c_(c), edges_{} {
    require_ratio_open(c);
    edges_ = mp_edges(c);
}

cplx MarchenkoPastur::stieltjes(cplx z, int order) const {
    return mp_stieltjes_derivative(z, c_, order);
}

double MarchenkoPastur::h_at_upper_edge() const {
    const double r = std::sqrt(c_);
    return -(1.0 + r) / r;
}

double MarchenkoPastur::h_at_lower_edge() const {
    const double r = std::sqrt(c_);
    return (1.0 - r) / r;
}

double law_h(double x, const SpectralLaw& law) { return law.h(x); }
double law_h_prime(double x, const SpectralLaw& law) { return law.h_prime(x); }
double law_h_second(double x, const SpectralLaw& law) { return law.h_second(x); }

}  // namespace spike
