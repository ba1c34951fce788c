#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spike/detection.hpp"
#include "spike/failure_models.hpp"
#include "spike/localization.hpp"
#include "spike/random.hpp"

namespace spike {

/// Sigma = (I + P)^{1/2} X T^{1/2} with X N x n, entries CN(0, 1/n), and T the
/// diagonal matrix of `time_spectrum` (length n) when given. An empty
/// scenario samples H0.
Eigen::MatrixXcd sample_observation(const FailureScenario& scenario, int N, int n, Rng& rng,
                                    const Eigen::VectorXd* time_spectrum = nullptr);

/// M <- (I + P)^{1/2} M via the rank-r update I + U((I + Omega)^{1/2} - I)U*.
void apply_population_root(const FailureScenario& scenario, Eigen::MatrixXcd& M);

/// Sigma T^{-1/2}. Throws DomainError when min(T) <= 1e-12.
Eigen::MatrixXcd whiten(const Eigen::MatrixXcd& sigma, const Eigen::VectorXd& time_spectrum);

/// Sigma Sigma* sampled directly (no time correlation): Bartlett factor of the
/// complex Wishart XX*, then the rank-r congruence by (I + P)^{1/2}. Needs n >= N.
Eigen::MatrixXcd sample_gram(const FailureScenario& scenario, int N, int n, Rng& rng);

/// Eigenvalues (decreasing) of XX* under H0 from the bidiagonal Laguerre model.
Eigen::VectorXd sample_h0_eigenvalues(int N, int n, Rng& rng);

/// Worker count: $SPIKE_THREADS if set, else hardware concurrency.
int worker_count();

/// Runs body(t) for t in [0, trials) on `threads` workers.
void parallel_for(int trials, int threads, const std::function<void(int)>& body);

struct HistogramConfig {
    int N = 256;
    int n = 2048;
    double omega = 1.0;
    int trials = 10000;
    std::uint64_t seed = 1;
    int threads = 0;  // 0 = worker_count()
};

struct HistogramResult {
    std::vector<double> projection;  // sqrt(N)(|u_hat* u|^2 - zeta)
    std::vector<double> eigenvalue;  // sqrt(N)(lambda_1 - rho)
    double omega = 0.0;
    double rho = 0.0;
    double zeta = 0.0;
    double c11 = 0.0;
    double c12 = 0.0;
    double c22 = 0.0;
    int N = 0;
    int n = 0;
};

/// Rank-one spike along e_1; records the fluctuation samples of Figure 1.
HistogramResult run_histogram_experiment(const HistogramConfig& config);

/// Kolmogorov-Smirnov distance between the samples and N(0, variance).
double ks_distance_normal(std::vector<double> samples, double variance);

struct SweepConfig {
    int N = 0;
    std::vector<int> n_grid;
    std::vector<double> etas;
    int trials = 10000;
    std::uint64_t seed = 1;
    int threads = 0;

    std::vector<FailureScenario> hypotheses;
    int truth = -1;  // index into hypotheses, -1 samples H0

    DetectionConfig detection;  // eta is taken from the grid

    bool known_amplitude = true;  // CLR via localize_known
    LocalizeOptions localize;
    bool unknown_amplitude = false;  // CLR2 via the minimum-distance estimator
    std::vector<Eigen::VectorXcd> directions;
    Side side = Side::upper;

    /// Time correlation T = diag(linear_time_spectrum(n, min, max)); the
    /// observation is then sampled explicitly and optionally whitened.
    bool time_correlated = false;
    double time_spectrum_min = 1.0;
    double time_spectrum_max = 1.0;
    bool whiten = false;
};

struct SweepCell {
    int n = 0;
    double eta = 0.0;
    int trials = 0;
    long detected = 0;
    long localized = 0;
    long localized2 = 0;
    double cdr = 0.0;
    double clr = 0.0;   // nan when not run
    double clr2 = 0.0;  // nan when not run
    double se = 0.0;    // binomial standard error of cdr
};

struct McResult {
    std::vector<SweepCell> cells;
};

/// Detection then localization for every (n, eta) cell. Trial t of a cell
/// draws from trial_seed(seed, n, eta, t).
McResult run_detection_localization_sweep(const SweepConfig& config);

/// Linearly spaced time spectrum of length n on [lo, hi].
Eigen::VectorXd linear_time_spectrum(int n, double lo, double hi);

void write_csv(std::ostream& out, const McResult& result);
void write_histogram(std::ostream& samples, std::ostream& sidecar, const HistogramResult& result);

}  // namespace spike
