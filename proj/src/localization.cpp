#include "spike/localization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spike/errors.hpp"
#include "spike/spectral_law.hpp"
#include "spike/spike_algebra.hpp"

namespace spike {

std::string to_string(LocalizationMethod m) {
    switch (m) {
        case LocalizationMethod::likelihood: return "likelihood";
        case LocalizationMethod::projection_only: return "projection_only";
        case LocalizationMethod::unknown_amplitude: return "unknown_amplitude";
    }
    return "likelihood";
}

std::string to_string(LocalizationStatus s) {
    switch (s) {
        case LocalizationStatus::ok: return "ok";
        case LocalizationStatus::inconclusive: return "inconclusive";
        case LocalizationStatus::not_estimable: return "not_estimable";
    }
    return "ok";
}

Eigen::VectorXd flatten_hermitian(const Eigen::MatrixXcd& V) {
    const auto j = V.rows();
    Eigen::VectorXd out(j * j);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < j; ++i) out(k++) = V(i, i).real();
    const double r2 = std::sqrt(2.0);
    for (Eigen::Index i = 0; i < j; ++i) {
        for (Eigen::Index l = i + 1; l < j; ++l) {
            out(k++) = r2 * V(i, l).real();
            out(k++) = r2 * V(i, l).imag();
        }
    }
    return out;
}

SpikeStatistics spike_statistics(const SpikeSpectrum& spectrum, const FailureScenario& scenario,
                                 const StatisticsOptions& opts) {
    const int N = spectrum.dimension();
    const double cN = spectrum.ratio();
    const double rootN = std::sqrt(static_cast<double>(N));
    SpikeStatistics out;
    if (scenario.empty()) return out;
    if (scenario.dimension() != N) throw DomainError("scenario dimension does not match the spectrum");

    const auto desc = scenario.descriptors(N);
    const int nspk = static_cast<int>(desc.size());

    int retained = 0;
    for (int i = 0; i < nspk; ++i) {
        const auto& d = desc[i];
        if (d.omega > 0 && opts.max_positive_spikes >= 0 && i >= opts.max_positive_spikes) continue;
        if (d.omega < 0 && opts.max_negative_spikes >= 0 && (nspk - 1 - i) >= opts.max_negative_spikes) continue;
        if (!separation_check_mp(d.omega, cN, opts.guard)) continue;
        retained += d.multiplicity;
        if (retained > N) throw DomainError("retained spikes exceed the dimension");

        SpikeStatistic s;
        s.spike = i;
        s.omega = d.omega;
        s.multiplicity = d.multiplicity;
        s.offset = d.index_offset;
        s.law = FluctuationLaw::marchenko_pastur(d.omega, cN);

        const Eigen::MatrixXcd& U = scenario.spikes[i].basis;
        const Eigen::MatrixXcd W = U.adjoint() * spectrum.vectors(d.index_offset, d.multiplicity);
        Eigen::MatrixXcd proj = W * W.adjoint();
        proj.diagonal().array() -= s.law.zeta;
        s.V = rootN * proj;
        s.L = rootN * (spectrum.eigenvalues().segment(d.index_offset, d.multiplicity).array() - s.law.rho);
        s.Vbar = flatten_hermitian(s.V);
        out.spikes.push_back(std::move(s));
    }
    return out;
}

std::vector<double> predicted_top_outliers(const std::vector<FailureScenario>& scenarios, double cN) {
    std::vector<double> out;
    out.reserve(scenarios.size());
    const double b = mp_edges(cN).upper;
    for (const auto& sc : scenarios) {
        const auto w = sc.largest_positive();
        if (!w) {
            out.push_back(std::numeric_limits<double>::infinity());
        } else if (separation_check_mp(*w, cN)) {
            out.push_back(rho_of_omega_mp(*w, cN));
        } else {
            out.push_back(b);
        }
    }
    return out;
}

std::vector<int> preselect(const SpikeSpectrum& spectrum, const std::vector<FailureScenario>& scenarios, int L) {
    if (scenarios.empty()) throw DomainError("scenario set is empty");
    const int K = static_cast<int>(scenarios.size());
    if (L > K) throw DomainError("cannot preselect more hypotheses than available");
    std::vector<int> idx(K);
    std::iota(idx.begin(), idx.end(), 0);
    if (L <= 0 || L == K) return idx;
    const auto rho = predicted_top_outliers(scenarios, spectrum.ratio());
    const double l1 = spectrum.largest();
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return std::abs(l1 - rho[a]) < std::abs(l1 - rho[b]); });
    idx.resize(L);
    return idx;
}

double spike_score(const SpikeStatistic& s, bool use_eigenvalues) {
    const double two_pi_log = std::log(2.0 * M_PI);
    const double c11 = s.law.C(0, 0);
    if (!(c11 > 0.0)) throw DomainError("degenerate projection variance");
    if (s.multiplicity == 1) {
        const double v = s.V(0, 0).real();
        if (use_eigenvalues) {
            const Eigen::Vector2d x(v, s.L(0));
            return -2.0 * gaussian_logpdf(x, s.law.C);
        }
        return v * v / c11 + std::log(c11) + two_pi_log;
    }
    const double j2 = static_cast<double>(s.multiplicity) * s.multiplicity;
    return s.Vbar.squaredNorm() / c11 + j2 * std::log(c11) + j2 * two_pi_log;
}

LocalizationReport localize_known(const SpikeSpectrum& spectrum, const std::vector<FailureScenario>& scenarios,
                                  const LocalizeOptions& opts) {
    LocalizationReport rep;
    const int K = static_cast<int>(scenarios.size());
    if (K == 0) throw DomainError("scenario set is empty");
    rep.scores.assign(K, std::numeric_limits<double>::infinity());
    bool any_multi = false;
    bool any = false;
    double best = std::numeric_limits<double>::infinity();
    for (int k : preselect(spectrum, scenarios, opts.preselect)) {
        const SpikeStatistics st = spike_statistics(spectrum, scenarios[k], opts.stats);
        if (st.empty()) continue;
        if (opts.outlier_count) {
            int pos = 0;
            for (const auto& s : st.spikes) {
                if (s.omega > 0) pos += s.multiplicity;
            }
            if (pos != *opts.outlier_count) continue;
        }
        double score = 0.0;
        for (const auto& s : st.spikes) {
            any_multi = any_multi || s.multiplicity > 1;
            score += spike_score(s, opts.use_eigenvalues);
        }
        rep.scores[k] = score;
        rep.subset.push_back(k);
        any = true;
        if (score < best) {
            best = score;
            rep.chosen = k;
        }
    }
    std::sort(rep.subset.begin(), rep.subset.end());
    rep.method = (any_multi || !opts.use_eigenvalues) ? LocalizationMethod::projection_only
                                                      : LocalizationMethod::likelihood;
    if (!any) {
        rep.status = LocalizationStatus::inconclusive;
        rep.message = "no identifiable hypothesis: eigenvalue-only inconclusive";
        rep.chosen = -1;
    } else if (rep.chosen < 0) {
        // Every score was +inf or nan; fall back to the lowest admissible index.
        rep.chosen = rep.subset.front();
    }
    return rep;
}

LocalizationReport localize_unknown_amplitude(const SpikeSpectrum& spectrum,
                                              const std::vector<Eigen::VectorXcd>& directions, Side side) {
    if (directions.empty()) throw DomainError("hypothesis set is empty");
    LocalizationReport rep;
    rep.method = LocalizationMethod::unknown_amplitude;
    const int K = static_cast<int>(directions.size());
    rep.scores.assign(K, std::numeric_limits<double>::infinity());
    const double cN = spectrum.ratio();
    const Edges e = mp_edges(cN);
    const int pos = side == Side::upper ? 0 : spectrum.dimension() - 1;
    const double lambda = spectrum.eigenvalues()(pos);
    if ((side == Side::upper && !(lambda > e.upper)) || (side == Side::lower && !(lambda < e.lower))) {
        rep.status = LocalizationStatus::not_estimable;
        rep.message = "amplitude not estimable: eigenvalue " + std::to_string(lambda) + " inside the bulk";
        return rep;
    }
    rep.omega_hat = omega_hat_from_lambda(lambda, cN);
    rep.zeta_hat = (1.0 - cN / (rep.omega_hat * rep.omega_hat)) / (1.0 + cN / rep.omega_hat);
    const Eigen::VectorXcd u_hat = spectrum.vectors(pos, 1).col(0);
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) {
        if (directions[k].size() != u_hat.size()) throw DomainError("direction dimension does not match the spectrum");
        const double proj = std::norm(directions[k].dot(u_hat));
        rep.scores[k] = std::abs(proj - rep.zeta_hat);
        rep.subset.push_back(k);
        if (rep.scores[k] < best) {
            best = rep.scores[k];
            rep.chosen = k;
        }
    }
    return rep;
}

}  // namespace spike
