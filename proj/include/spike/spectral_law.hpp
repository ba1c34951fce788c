#pragma once

#include <complex>

namespace spike {

using cplx = std::complex<double>;

/// Points closer than this to the support [a, b] are rejected.
inline constexpr double kSupportTolerance = 1e-9;

struct Edges {
    double lower;  // a
    double upper;  // b
};

/// Limiting spectral law of XX*: Stieltjes transform m(z) = int dpi(t)/(t - z)
/// and its first three derivatives, evaluated off the compact support [a, b].
///
/// Everything the spike formulas need is derived from this interface, so any
/// law with compact support in (0, inf) can be plugged in.
class SpectralLaw {
public:
    virtual ~SpectralLaw() = default;

    /// Limiting ratio c = lim N/n.
    virtual double ratio() const = 0;
    virtual Edges edges() const = 0;

    /// m^(order)(z) for order in {0, 1, 2, 3}. Throws DomainError when z lies
    /// within kSupportTolerance of the support or equals zero.
    virtual cplx stieltjes(cplx z, int order = 0) const = 0;

    double lower_edge() const { return edges().lower; }
    double upper_edge() const { return edges().upper; }

    /// h(x) = x m(x) and its first two derivatives on the real line off [a, b].
    double h(double x) const;
    double h_prime(double x) const;
    double h_second(double x) const;

    /// lim h(x) as x decreases to b, and as x increases to a. The default
    /// extrapolates from two points assuming a square-root edge.
    virtual double h_at_upper_edge() const;
    virtual double h_at_lower_edge() const;

    /// True when z is off the support (and nonzero) with the stated tolerance.
    bool is_off_support(cplx z) const;
};

/// Marchenko-Pastur law with ratio c in (0, 1).
class MarchenkoPastur final : public SpectralLaw {
public:
    explicit MarchenkoPastur(double c);

    double ratio() const override { return c_; }
    Edges edges() const override { return edges_; }
    cplx stieltjes(cplx z, int order = 0) const override;

    double h_at_upper_edge() const override;
    double h_at_lower_edge() const override;

private:
    double c_;
    Edges edges_;
};

/// a = (1 - sqrt c)^2, b = (1 + sqrt c)^2 for c in [0, 1].
Edges mp_edges(double c);

/// Marchenko-Pastur Stieltjes transform at z off the support.
cplx mp_stieltjes(cplx z, double c);

/// Derivative m^(order)(z), order in {0,1,2,3}.
cplx mp_stieltjes_derivative(cplx z, double c, int order);

double law_h(double x, const SpectralLaw& law);
double law_h_prime(double x, const SpectralLaw& law);
double law_h_second(double x, const SpectralLaw& law);

}  // namespace spike
