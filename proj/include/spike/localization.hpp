#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spike/failure_models.hpp"
#include "spike/fluctuation.hpp"
#include "spike/spectrum.hpp"

namespace spike {

struct StatisticsOptions {
    /// Keep at most this many positive (resp. negative) spikes, counted from
    /// the most extreme one. Negative means no limit.
    int max_positive_spikes = -1;
    int max_negative_spikes = -1;
    double guard = 1.0;
};

/// Fluctuation statistics of one separated spike of a hypothesis.
struct SpikeStatistic {
    int spike = 0;  // index into FailureScenario::spikes
    double omega = 0.0;
    int multiplicity = 1;
    int offset = 0;  // first 0-based eigenvalue position of the block
    FluctuationLaw law;
    Eigen::MatrixXcd V;    // sqrt(N) U* (Pi_hat - zeta I) U
    Eigen::VectorXd L;     // sqrt(N) (lambda_block - rho)
    Eigen::VectorXd Vbar;  // (diag V, sqrt2 Re/Im of upper entries)
};

struct SpikeStatistics {
    std::vector<SpikeStatistic> spikes;
    bool empty() const { return spikes.empty(); }
};

/// Statistics of every spike of `scenario` that is separated at c_N.
SpikeStatistics spike_statistics(const SpikeSpectrum& spectrum, const FailureScenario& scenario,
                                 const StatisticsOptions& opts = {});

/// Flattens a Hermitian j x j matrix to R^{j^2}: diagonal, then sqrt2 times
/// the real and imaginary parts of the upper entries.
Eigen::VectorXd flatten_hermitian(const Eigen::MatrixXcd& V);

/// Location of the largest outlier predicted by each hypothesis at c_N: rho of
/// the largest positive spike, b when it is not separated, +inf without one.
std::vector<double> predicted_top_outliers(const std::vector<FailureScenario>& scenarios, double cN);

/// Indices of the L hypotheses whose predicted top outlier is closest to
/// lambda_1. Ties go to the lower index. L <= 0 keeps all.
std::vector<int> preselect(const SpikeSpectrum& spectrum, const std::vector<FailureScenario>& scenarios, int L);

enum class LocalizationMethod { likelihood, projection_only, unknown_amplitude };
enum class LocalizationStatus { ok, inconclusive, not_estimable };

std::string to_string(LocalizationMethod m);
std::string to_string(LocalizationStatus s);

struct LocalizationReport {
    LocalizationStatus status = LocalizationStatus::ok;
    LocalizationMethod method = LocalizationMethod::likelihood;
    int chosen = -1;                 // index into the hypothesis list
    std::vector<double> scores;      // per hypothesis; +inf when excluded
    std::vector<int> subset;         // S
    std::string message;
    double omega_hat = std::numeric_limits<double>::quiet_NaN();
    double zeta_hat = std::numeric_limits<double>::quiet_NaN();

    bool ok() const { return status == LocalizationStatus::ok; }
};

struct LocalizeOptions {
    StatisticsOptions stats;
    int preselect = 0;  // L; 0 keeps every hypothesis
    /// Drop the eigenvalue part L of unit-multiplicity spikes.
    bool use_eigenvalues = true;
    /// When set, hypotheses whose count of separated positive spikes differs
    /// from this observed outlier count are dropped.
    std::optional<int> outlier_count;
};

/// Score of one spike: -2 log density of (V, L) under N(0, C) for unit
/// multiplicity, the projection-only form for larger blocks.
double spike_score(const SpikeStatistic& s, bool use_eigenvalues);

/// Maximum-likelihood hypothesis among the preselected ones.
LocalizationReport localize_known(const SpikeSpectrum& spectrum, const std::vector<FailureScenario>& scenarios,
                                  const LocalizeOptions& opts = {});

enum class Side { upper, lower };

/// Minimum-distance estimator for rank-one hypotheses with unknown amplitude.
/// `directions` are unit vectors u_k.
LocalizationReport localize_unknown_amplitude(const SpikeSpectrum& spectrum,
                                              const std::vector<Eigen::VectorXcd>& directions,
                                              Side side = Side::upper);

}  // namespace spike
