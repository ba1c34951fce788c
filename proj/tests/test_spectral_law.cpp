#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "spike/errors.hpp"
#include "spike/spectral_law.hpp"

using namespace spike;
using Catch::Approx;

namespace {

// Same law, but with the base-class edge limits.
class PlainMp : public SpectralLaw {
public:
    explicit PlainMp(double c) : mp_(c) {}
    double ratio() const override { return mp_.ratio(); }
    Edges edges() const override { return mp_.edges(); }
    cplx stieltjes(cplx z, int order) const override { return mp_.stieltjes(z, order); }

private:
    MarchenkoPastur mp_;
};

cplx random_off_support(std::mt19937_64& rng, double c) {
    const auto e = mp_edges(c);
    std::uniform_real_distribution<double> u(-3.0, 6.0);
    for (;;) {
        cplx z(u(rng), u(rng) * 0.5);
        if (std::abs(z) < 1e-3) continue;
        if (std::abs(z.imag()) < 1e-3 && z.real() > e.lower - 1e-3 && z.real() < e.upper + 1e-3) continue;
        return z;
    }
}

}  // namespace

TEST_CASE("mp_edges golden values") {
    auto e = mp_edges(0.125);
    CHECK(e.lower == Approx(0.417893).margin(5e-7));
    CHECK(e.upper == Approx(1.832107).margin(5e-7));
    e = mp_edges(0.0);
    CHECK(e.lower == 1.0);
    CHECK(e.upper == 1.0);
    e = mp_edges(1.0);
    CHECK(e.lower == 0.0);
    CHECK(e.upper == 4.0);
    CHECK_THROWS_AS(mp_edges(-0.1), DomainError);
    CHECK_THROWS_AS(mp_edges(1.1), DomainError);
}

TEST_CASE("mp_stieltjes selects the root vanishing at infinity") {
    const cplx m = mp_stieltjes(2.25, 0.125);
    CHECK(m.real() == Approx(-0.888889).margin(1e-6));
    CHECK(std::abs(m.imag()) < 1e-15);
    // The two roots of c z m^2 + (z - 1 + c) m + 1 = 0 at z = 2.25 are -8/9 and -4.
    const double c = 0.125, z = 2.25;
    const double B = z - 1 + c;
    const double disc = std::sqrt(B * B - 4 * c * z);
    const double r1 = (-B + disc) / (2 * c * z), r2 = (-B - disc) / (2 * c * z);
    CHECK(std::min(r1, r2) == Approx(-4.0));
    CHECK(m.real() == Approx(std::max(r1, r2)).epsilon(1e-14));
}

TEST_CASE("mp_stieltjes satisfies the quadratic identity") {
    std::mt19937_64 rng(11);
    for (double c : {0.05, 0.125, 0.5, 0.9}) {
        for (int i = 0; i < 20; ++i) {
            const cplx z = random_off_support(rng, c);
            const cplx m = mp_stieltjes(z, c);
            const cplx res = c * z * m * m - (1.0 - c - z) * m + 1.0;
            const double scale = std::abs(c * z * m * m) + std::abs((1.0 - c - z) * m) + 1.0;
            CHECK(std::abs(res) / scale < 1e-12);
        }
    }
}

TEST_CASE("mp_stieltjes tail and branch") {
    CHECK(mp_stieltjes(1e6, 0.125).real() == Approx(-1e-6).epsilon(0.01));
    for (int i = 0; i < 10; ++i) {
        for (int k = 0; k < 10; ++k) {
            const cplx z(-2.0 + 0.8 * i, 0.01 + 0.3 * k);
            CHECK(mp_stieltjes(z, 0.125).imag() > 0.0);
            CHECK(mp_stieltjes(std::conj(z), 0.125).imag() < 0.0);
        }
    }
    // m(x) < 0 above the bulk, > 0 on (0, a).
    CHECK(mp_stieltjes(3.0, 0.3).real() < 0.0);
    CHECK(mp_stieltjes(0.05, 0.3).real() > 0.0);
}

TEST_CASE("mp_stieltjes rejects points on the support") {
    CHECK_THROWS_AS(mp_stieltjes(1.0, 0.125), DomainError);
    CHECK_THROWS_AS(mp_stieltjes(mp_edges(0.125).upper + 5e-10, 0.125), DomainError);
    CHECK_THROWS_AS(mp_stieltjes(0.0, 0.125), DomainError);
    CHECK_THROWS_AS(mp_stieltjes(2.25, 0.0), DomainError);
    CHECK_THROWS_AS(mp_stieltjes(2.25, 1.0), DomainError);
    CHECK_NOTHROW(mp_stieltjes(cplx(1.0, 1e-3), 0.125));
}

TEST_CASE("h and its derivatives at 2.25") {
    const MarchenkoPastur law(0.125);
    CHECK(law_h(2.25, law) == Approx(-2.0).epsilon(1e-13));
    CHECK(law_h_prime(2.25, law) == Approx(8.0 / 7.0).epsilon(1e-13));
    // Complex-step derivative of h.
    const double eps = 1e-20;
    const cplx zc(2.25, eps);
    const double cs = (zc * law.stieltjes(zc)).imag() / eps;
    CHECK(law_h_prime(2.25, law) == Approx(cs).epsilon(1e-12));
    // h'' against a central difference of h'.
    const double d = 1e-5 * 3.25;
    const double fd = (law_h_prime(2.25 + d, law) - law_h_prime(2.25 - d, law)) / (2 * d);
    CHECK(law_h_second(2.25, law) == Approx(fd).epsilon(1e-6));
}

TEST_CASE("h is increasing and bounded off the support") {
    std::mt19937_64 rng(3);
    for (double c : {0.125, 0.4}) {
        const MarchenkoPastur law(c);
        const auto e = law.edges();
        std::uniform_real_distribution<double> above(e.upper + 1e-6, e.upper + 20.0), below(1e-6, e.lower - 1e-6);
        for (int i = 0; i < 25; ++i) {
            const double x1 = above(rng), x2 = above(rng);
            CHECK(law.h_prime(x1) > 0.0);
            // Above the bulk h runs from h(b+) up to -1.
            CHECK(law.h(x1) > law.h_at_upper_edge());
            CHECK(law.h(x1) < -1.0);
            if (x1 < x2) CHECK(law.h(x1) < law.h(x2));
            const double y1 = below(rng), y2 = below(rng);
            CHECK(law.h_prime(y1) > 0.0);
            CHECK(law.h(y1) > 0.0);
            if (y1 < y2) CHECK(law.h(y1) < law.h(y2));
        }
    }
}

TEST_CASE("analytic derivatives match central differences") {
    std::mt19937_64 rng(5);
    for (double c : {0.125, 0.6}) {
        const MarchenkoPastur law(c);
        for (int i = 0; i < 20; ++i) {
            const cplx z = random_off_support(rng, c);
            const double h = 1e-5 * (1.0 + std::abs(z));
            for (int order = 1; order <= 3; ++order) {
                const cplx fd = (law.stieltjes(z + h, order - 1) - law.stieltjes(z - h, order - 1)) / (2.0 * h);
                const cplx an = law.stieltjes(z, order);
                CHECK(std::abs(an - fd) <= 1e-5 * std::abs(an) + 1e-10);
            }
        }
    }
    const MarchenkoPastur law(0.125);
    const double h = 1e-5 * 3.25;
    const double m1 = law.stieltjes(2.25, 1).real();
    CHECK(m1 == Approx((law.stieltjes(2.25 + h).real() - law.stieltjes(2.25 - h).real()) / (2 * h)).epsilon(1e-6));
    const double m3 = law.stieltjes(2.25, 3).real();
    CHECK(m3 == Approx((law.stieltjes(2.25 + h, 2).real() - law.stieltjes(2.25 - h, 2).real()) / (2 * h)).epsilon(1e-4));
    CHECK_THROWS_AS(law.stieltjes(2.25, 4), DomainError);
}

TEST_CASE("m' is positive above the bulk") {
    std::mt19937_64 rng(8);
    const MarchenkoPastur law(0.125);
    std::uniform_real_distribution<double> u(law.upper_edge() + 1e-6, 30.0);
    for (int i = 0; i < 20; ++i) CHECK(law.stieltjes(u(rng), 1).real() > 0.0);
}

TEST_CASE("edge limits of h") {
    for (double c : {0.05, 0.125, 0.5, 0.8}) {
        const MarchenkoPastur mp(c);
        CHECK(mp.h_at_upper_edge() == Approx(-(1 + std::sqrt(c)) / std::sqrt(c)));
        CHECK(mp.h_at_lower_edge() == Approx((1 - std::sqrt(c)) / std::sqrt(c)));
        const PlainMp plain(c);
        CHECK(plain.h_at_upper_edge() == Approx(mp.h_at_upper_edge()).epsilon(1e-5));
        CHECK(plain.h_at_lower_edge() == Approx(mp.h_at_lower_edge()).epsilon(1e-5));
    }
}
