#include "spike/spike_algebra.hpp"

#include <cmath>
#include <string>

#include "spike/errors.hpp"

namespace spike {

namespace {

void require_valid_omega(double omega) {
    if (!(omega > -1.0) || omega == 0.0 || !std::isfinite(omega)) {
        throw DomainError("spike omega must satisfy omega > -1 and omega != 0, got " +
                          std::to_string(omega));
    }
}

void require_ratio(double c) {
    if (!(c > 0.0 && c < 1.0)) {
        throw DomainError("ratio c must lie in (0, 1), got " + std::to_string(c));
    }
}

}  // namespace

void assign_index_offsets(std::vector<SpikeDescriptor>& spikes, int N) {
    int top = 0;
    for (auto& s : spikes) {
        if (s.omega > 0.0) {
            s.index_offset = top;
            top += s.multiplicity;
        }
    }
    int bottom = N;
    for (auto it = spikes.rbegin(); it != spikes.rend(); ++it) {
        if (it->omega < 0.0) {
            bottom -= it->multiplicity;
            it->index_offset = bottom;
        }
    }
}

bool separation_check_mp(double omega, double c, double guard) {
    return std::abs(omega) > guard * std::sqrt(c);
}

bool separation_check(double omega, const SpectralLaw& law, double guard) {
    if (!(omega > -1.0) || omega == 0.0) return false;
    const double w = omega / guard;
    if (w <= -1.0) return false;
    const double target = (1.0 + w) / w;
    if (w > 0.0) return law.h_at_upper_edge() + target < 0.0;
    return law.h_at_lower_edge() + target > 0.0;
}

double rho_of_omega_mp(double omega, double c) {
    require_ratio(c);
    require_valid_omega(omega);
    if (!separation_check_mp(omega, c)) {
        const Edges e = mp_edges(c);
        throw SpikeNotSeparated(omega, omega > 0.0 ? e.upper : e.lower);
    }
    return 1.0 + omega + c * (1.0 + omega) / omega;
}

double rho_of_omega_general(double omega, const SpectralLaw& law) {
    require_valid_omega(omega);
    const Edges e = law.edges();
    if (!separation_check(omega, law)) {
        throw SpikeNotSeparated(omega, omega > 0.0 ? e.upper : e.lower);
    }
    // h is increasing off the support, so f(x) = h(x) + (1+omega)/omega has a
    // single sign change in the bracket.
    const double target = (1.0 + omega) / omega;
    auto f = [&](double x) { return law.h(x) + target; };

    const double eps = 4.0 * kSupportTolerance * (1.0 + e.upper);
    double lo = 0.0;
    double hi = 0.0;
    if (omega > 0.0) {
        lo = e.upper + eps;
        hi = e.upper + std::max(10.0, 4.0 * target * e.upper);
        while (f(hi) < 0.0) {
            lo = hi;
            hi = e.upper + 2.0 * (hi - e.upper);
            if (!std::isfinite(hi)) throw DomainError("rho bracketing diverged");
        }
        if (f(lo) > 0.0) {
            // Root squeezed against the edge tolerance.
            throw SpikeNotSeparated(omega, e.upper);
        }
    } else {
        // m is not evaluated within kSupportTolerance of zero.
        lo = std::min(1e-6, 1e-3 * e.lower);
        hi = e.lower - eps;
        if (f(hi) < 0.0) throw SpikeNotSeparated(omega, e.lower);
        while (f(lo) > 0.0) {
            lo *= 0.1;
            if (lo < 10.0 * kSupportTolerance) throw DomainError("rho bracketing failed near zero");
        }
    }

    // Bisection to a tight bracket, then Newton polish within it.
    for (int it = 0; it < 200 && (hi - lo) > 1e-10 * (1.0 + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 50; ++it) {
        const double fx = f(x);
        if (std::abs(fx) <= 1e-14 * (1.0 + std::abs(target))) break;
        const double step = fx / law.h_prime(x);
        const double next = x - step;
        if (!(next > lo && next < hi)) break;
        if (next == x) break;
        x = next;
    }
    return x;
}

double omega_hat_from_lambda(double lambda_hat, double c) {
    const Edges e = mp_edges(c);
    if (lambda_hat > e.lower && lambda_hat < e.upper) {
        throw DomainError("eigenvalue " + std::to_string(lambda_hat) +
                          " inside bulk, not invertible");
    }
    const double shifted = lambda_hat - (1.0 + c);
    const double root = std::sqrt(std::max(0.0, shifted * shifted - 4.0 * c));
    return lambda_hat >= e.upper ? 0.5 * (shifted + root) : 0.5 * (shifted - root);
}

double zeta_mp(double omega, double c) {
    require_ratio(c);
    require_valid_omega(omega);
    if (!separation_check_mp(omega, c)) {
        const Edges e = mp_edges(c);
        throw SpikeNotSeparated(omega, omega > 0.0 ? e.upper : e.lower);
    }
    return (1.0 - c / (omega * omega)) / (1.0 + c / omega);
}

double zeta_general(double rho, const SpectralLaw& law) {
    const cplx z{rho, 0.0};
    if (!law.is_off_support(z)) {
        throw DomainError("rho = " + std::to_string(rho) + " lies on the support");
    }
    const double m = law.stieltjes(z, 0).real();
    const double h = rho * m;
    return m * (1.0 + h) / law.h_prime(rho);
}

}  // namespace spike
