#include "spike/sim_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include <lapacke.h>

#include "json.hpp"
#include "spike/errors.hpp"
#include "spike/fluctuation.hpp"
#include "spike/spike_algebra.hpp"

namespace spike {

Eigen::MatrixXcd sample_observation(const FailureScenario& scenario, int N, int n, Rng& rng,
                                    const Eigen::VectorXd* time_spectrum) {
    if (N < 1 || n < 1) throw DomainError("observation dimensions must be positive");
    if (!scenario.empty() && scenario.dimension() != N) throw DomainError("scenario dimension does not match N");
    const double var = 1.0 / n;
    Eigen::MatrixXcd X(N, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < N; ++i) X(i, j) = complex_normal(rng, var);
    }
    if (time_spectrum != nullptr) {
        if (time_spectrum->size() != n) throw DomainError("time spectrum length must equal n");
        if (time_spectrum->minCoeff() < 0.0) throw DomainError("time spectrum must be nonnegative");
        for (int j = 0; j < n; ++j) X.col(j) *= std::sqrt((*time_spectrum)(j));
    }
    apply_population_root(scenario, X);
    return X;
}

void apply_population_root(const FailureScenario& scenario, Eigen::MatrixXcd& M) {
    for (const auto& s : scenario.spikes) {
        if (s.omega <= -1.0) throw DomainError("spike omega must exceed -1");
        const double f = std::sqrt(1.0 + s.omega) - 1.0;
        const Eigen::MatrixXcd coeff = s.basis.adjoint() * M;
        M.noalias() += f * s.basis * coeff;
    }
}

Eigen::MatrixXcd whiten(const Eigen::MatrixXcd& sigma, const Eigen::VectorXd& time_spectrum) {
    if (time_spectrum.size() != sigma.cols()) throw DomainError("time spectrum length must equal n");
    if (time_spectrum.minCoeff() <= 1e-12) throw DomainError("time correlation is singular");
    Eigen::MatrixXcd out = sigma;
    for (Eigen::Index j = 0; j < out.cols(); ++j) out.col(j) /= std::sqrt(time_spectrum(j));
    return out;
}

Eigen::MatrixXcd sample_gram(const FailureScenario& scenario, int N, int n, Rng& rng) {
    if (N < 1 || n < N) throw DomainError("Bartlett sampling needs 1 <= N <= n");
    if (!scenario.empty() && scenario.dimension() != N) throw DomainError("scenario dimension does not match N");
    Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(N, N);
    for (int j = 0; j < N; ++j) {
        std::gamma_distribution<double> g(static_cast<double>(n - j), 1.0);
        T(j, j) = std::sqrt(g(rng));
        for (int i = j + 1; i < N; ++i) T(i, j) = complex_normal(rng);
    }
    Eigen::MatrixXcd W(N, N);
    W.noalias() = T.triangularView<Eigen::Lower>() * T.adjoint();
    W /= static_cast<double>(n);

    const int r = scenario.rank();
    if (r == 0) return W;
    Eigen::MatrixXcd U(N, r);
    Eigen::VectorXd d(r);
    int col = 0;
    for (const auto& s : scenario.spikes) {
        U.middleCols(col, s.multiplicity()) = s.basis;
        d.segment(col, s.multiplicity()).setConstant(std::sqrt(1.0 + s.omega) - 1.0);
        col += s.multiplicity();
    }
    // A W A with A = I + U D U*.
    const Eigen::MatrixXcd B = W * U;
    const Eigen::MatrixXcd UB = U.adjoint() * B;
    const Eigen::MatrixXcd UD = U * d.asDiagonal();
    const Eigen::MatrixXcd BD = B * d.asDiagonal();
    W.noalias() += UD * B.adjoint();
    W.noalias() += BD * U.adjoint();
    W.noalias() += UD * (UB * UD.adjoint());
    return W;
}

Eigen::VectorXd sample_h0_eigenvalues(int N, int n, Rng& rng) {
    if (N < 1 || n < N) throw DomainError("Laguerre sampling needs 1 <= N <= n");
    // Lower bidiagonal B with B_ii^2 ~ Gamma(n - i), B_{i+1,i}^2 ~ Gamma(N - 1 - i);
    // B B^T / n has the eigenvalues of XX*.
    Eigen::VectorXd dg(N), sub(std::max(N - 1, 0));
    for (int i = 0; i < N; ++i) {
        std::gamma_distribution<double> g(static_cast<double>(n - i), 1.0);
        dg(i) = std::sqrt(g(rng));
        if (i + 1 < N) {
            std::gamma_distribution<double> h(static_cast<double>(N - 1 - i), 1.0);
            sub(i) = std::sqrt(h(rng));
        }
    }
    Eigen::VectorXd d(N), e(std::max(N - 1, 0));
    for (int i = 0; i < N; ++i) {
        d(i) = dg(i) * dg(i) + (i > 0 ? sub(i - 1) * sub(i - 1) : 0.0);
        if (i + 1 < N) e(i) = dg(i) * sub(i);
    }
    if (N > 1) {
        const lapack_int info = LAPACKE_dsterf(N, d.data(), e.data());
        if (info != 0) throw DomainError("dsterf failed");
    }
    Eigen::VectorXd out = d.reverse() / static_cast<double>(n);
    return out;
}

int worker_count() {
    if (const char* env = std::getenv("SPIKE_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int trials, int threads, const std::function<void(int)>& body) {
    if (threads <= 0) threads = worker_count();
    threads = std::max(1, std::min(threads, trials));
    if (threads == 1) {
        for (int t = 0; t < trials; ++t) body(t);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex mu;
    auto worker = [&] {
        constexpr int chunk = 16;
        for (;;) {
            const int start = next.fetch_add(chunk);
            if (start >= trials) return;
            try {
                for (int t = start; t < std::min(trials, start + chunk); ++t) body(t);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!error) error = std::current_exception();
                next.store(trials);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

HistogramResult run_histogram_experiment(const HistogramConfig& config) {
    const int N = config.N;
    const int n = config.n;
    if (config.trials < 1) throw ConfigError("trials must be at least 1");
    if (N >= n) throw ConfigError("histogram experiment needs N < n");
    const double c = static_cast<double>(N) / n;
    const FluctuationLaw law = FluctuationLaw::marchenko_pastur(config.omega, c);

    ScenarioSpike s;
    s.omega = config.omega;
    s.basis = Eigen::MatrixXcd::Zero(N, 1);
    s.basis(0, 0) = 1.0;
    const FailureScenario scenario = explicit_scenario({s});

    HistogramResult res;
    res.omega = config.omega;
    res.rho = law.rho;
    res.zeta = law.zeta;
    res.c11 = law.C(0, 0);
    res.c12 = law.C(0, 1);
    res.c22 = law.C(1, 1);
    res.N = N;
    res.n = n;
    res.projection.assign(config.trials, 0.0);
    res.eigenvalue.assign(config.trials, 0.0);
    const double rootN = std::sqrt(static_cast<double>(N));
    parallel_for(config.trials, config.threads, [&](int t) {
        Rng rng(trial_seed(config.seed, n, config.omega, static_cast<std::uint64_t>(t)));
        const Eigen::MatrixXcd gram = sample_gram(scenario, N, n, rng);
        const SpikeSpectrum sp = SpikeSpectrum::from_gram(gram, n, 1, 0);
        const double proj = std::norm(sp.vectors(0, 1)(0, 0));
        res.projection[t] = rootN * (proj - law.zeta);
        res.eigenvalue[t] = rootN * (sp.largest() - law.rho);
    });
    return res;
}

double ks_distance_normal(std::vector<double> samples, double variance) {
    if (samples.empty()) throw DomainError("no samples");
    if (!(variance > 0.0)) throw DomainError("variance must be positive");
    std::sort(samples.begin(), samples.end());
    const double sd = std::sqrt(variance);
    const double m = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double F = 0.5 * std::erfc(-samples[i] / (sd * std::sqrt(2.0)));
        d = std::max({d, F - i / m, (i + 1) / m - F});
    }
    return d;
}

Eigen::VectorXd linear_time_spectrum(int n, double lo, double hi) {
    if (n < 1) throw DomainError("time spectrum length must be positive");
    if (n == 1) return Eigen::VectorXd::Constant(1, 0.5 * (lo + hi));
    return Eigen::VectorXd::LinSpaced(n, lo, hi);
}

namespace {

struct VectorNeeds {
    int top = 0;
    int bottom = 0;
};

VectorNeeds vector_needs(const SweepConfig& cfg) {
    VectorNeeds v;
    if (cfg.truth < 0) return v;
    if (cfg.known_amplitude) {
        for (const auto& h : cfg.hypotheses) {
            int pos = 0, neg = 0, npos = 0, nneg = 0;
            for (const auto& s : h.spikes) {
                if (s.omega > 0) {
                    if (cfg.localize.stats.max_positive_spikes < 0 || npos < cfg.localize.stats.max_positive_spikes) {
                        pos += s.multiplicity();
                    }
                    ++npos;
                }
            }
            for (auto it = h.spikes.rbegin(); it != h.spikes.rend(); ++it) {
                if (it->omega < 0) {
                    if (cfg.localize.stats.max_negative_spikes < 0 || nneg < cfg.localize.stats.max_negative_spikes) {
                        neg += it->multiplicity();
                    }
                    ++nneg;
                }
            }
            v.top = std::max(v.top, pos);
            v.bottom = std::max(v.bottom, neg);
        }
    }
    if (cfg.unknown_amplitude) {
        if (cfg.side == Side::upper) {
            v.top = std::max(v.top, 1);
        } else {
            v.bottom = std::max(v.bottom, 1);
        }
    }
    return v;
}

std::string format_rate(double x) {
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

}  // namespace

McResult run_detection_localization_sweep(const SweepConfig& cfg) {
    if (cfg.trials < 1) throw ConfigError("trials must be at least 1");
    if (cfg.N < 1) throw ConfigError("dimension must be positive");
    if (cfg.n_grid.empty() || cfg.etas.empty()) throw ConfigError("n grid and eta list must be nonempty");
    if (cfg.truth >= static_cast<int>(cfg.hypotheses.size())) throw ConfigError("true hypothesis index out of range");
    for (const auto& h : cfg.hypotheses) {
        if (!h.empty() && h.dimension() != cfg.N) throw ConfigError("hypothesis dimension does not match N");
    }
    if (cfg.unknown_amplitude && cfg.directions.size() != cfg.hypotheses.size()) {
        throw ConfigError("unknown-amplitude localization needs one direction per hypothesis");
    }
    static const FailureScenario h0;
    const FailureScenario& truth = cfg.truth >= 0 ? cfg.hypotheses[cfg.truth] : h0;
    const bool localize = cfg.truth >= 0;
    const VectorNeeds need = vector_needs(cfg);

    McResult result;
    for (int n : cfg.n_grid) {
        if (n <= cfg.N) throw ConfigError("n must exceed N (c_N < 1), got n=" + std::to_string(n));
        const Eigen::VectorXd tspec =
            cfg.time_correlated ? linear_time_spectrum(n, cfg.time_spectrum_min, cfg.time_spectrum_max) : Eigen::VectorXd();
        for (double eta : cfg.etas) {
            DetectionConfig dc = cfg.detection;
            dc.eta = eta;
            detection_thresholds(dc);  // validate once before spawning workers
            std::vector<unsigned char> flags(cfg.trials, 0);
            parallel_for(cfg.trials, cfg.threads, [&](int t) {
                Rng rng(trial_seed(cfg.seed, n, eta, static_cast<std::uint64_t>(t)));
                unsigned char f = 0;
                if (!localize && !cfg.time_correlated) {
                    const Eigen::VectorXd ev = sample_h0_eigenvalues(cfg.N, n, rng);
                    if (detect_extremes(ev(0), ev(cfg.N - 1), cfg.N, n, dc).decision == Decision::H0_bar) f |= 1;
                    flags[t] = f;
                    return;
                }
                std::optional<SpikeSpectrum> sp;
                if (cfg.time_correlated) {
                    Eigen::MatrixXcd sigma = sample_observation(truth, cfg.N, n, rng, &tspec);
                    if (cfg.whiten) sigma = whiten(sigma, tspec);
                    sp.emplace(SpikeSpectrum::from_observation(sigma, need.top, need.bottom));
                } else {
                    sp.emplace(SpikeSpectrum::from_gram(sample_gram(truth, cfg.N, n, rng), n, need.top, need.bottom));
                }
                const DetectionReport det = detect_extremes(sp->largest(), sp->smallest(), cfg.N, n, dc);
                if (det.decision == Decision::H0_bar) {
                    f |= 1;
                    if (localize && cfg.known_amplitude) {
                        const LocalizationReport rep = localize_known(*sp, cfg.hypotheses, cfg.localize);
                        if (rep.ok() && rep.chosen == cfg.truth) f |= 2;
                    }
                    if (localize && cfg.unknown_amplitude) {
                        const LocalizationReport rep = localize_unknown_amplitude(*sp, cfg.directions, cfg.side);
                        if (rep.ok() && rep.chosen == cfg.truth) f |= 4;
                    }
                }
                flags[t] = f;
            });
            SweepCell cell;
            cell.n = n;
            cell.eta = eta;
            cell.trials = cfg.trials;
            for (unsigned char f : flags) {
                cell.detected += (f & 1) ? 1 : 0;
                cell.localized += (f & 2) ? 1 : 0;
                cell.localized2 += (f & 4) ? 1 : 0;
            }
            const double T = cfg.trials;
            cell.cdr = cell.detected / T;
            cell.clr = (localize && cfg.known_amplitude) ? cell.localized / T : std::nan("");
            cell.clr2 = (localize && cfg.unknown_amplitude) ? cell.localized2 / T : std::nan("");
            cell.se = std::sqrt(cell.cdr * (1.0 - cell.cdr) / T);
            result.cells.push_back(cell);
        }
    }
    return result;
}

void write_csv(std::ostream& out, const McResult& result) {
    out << "n,eta,trials,cdr,clr,clr2,se\n";
    char eta[32];
    for (const auto& c : result.cells) {
        std::snprintf(eta, sizeof eta, "%.6g", c.eta);
        out << c.n << ',' << eta << ',' << c.trials << ',' << format_rate(c.cdr) << ',' << format_rate(c.clr) << ','
            << format_rate(c.clr2) << ',' << format_rate(c.se) << '\n';
    }
}

void write_histogram(std::ostream& samples, std::ostream& sidecar, const HistogramResult& r) {
    char buf[64];
    for (std::size_t i = 0; i < r.projection.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", r.projection[i], r.eigenvalue[i]);
        samples << buf;
    }
    nlohmann::ordered_json j;
    j["zeta"] = r.zeta;
    j["c11"] = r.c11;
    j["c12"] = r.c12;
    j["c22"] = r.c22;
    j["rho"] = r.rho;
    j["omega"] = r.omega;
    j["N"] = r.N;
    j["n"] = r.n;
    j["samples"] = r.projection.size();
    j["columns"] = {"projection", "eigenvalue"};
    sidecar << j.dump(2) << '\n';
}

}  // namespace spike
