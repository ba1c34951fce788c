#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "spike/failure_models.hpp"
#include "spike/spectrum.hpp"

namespace spike {

enum class DetectionMode {
    upper,                // lambda'_1 > q(1 - eta)
    lower,                // lambda'_N > q(1 - eta)
    two_sided_fixed_b,    // lambda'_N > b  or  lambda'_1 > q((1 - eta) / F(b))
    two_sided_fixed_a,    // lambda'_1 > a  or  lambda'_N > q((1 - eta) / F(a))
    two_sided_symmetric,  // max(lambda'_1, lambda'_N) > q(sqrt(1 - eta))
};

std::string to_string(DetectionMode m);
DetectionMode parse_detection_mode(const std::string& s);

struct DetectionConfig {
    double eta = 0.01;
    DetectionMode mode = DetectionMode::upper;
    /// The fixed threshold b (or a) of the two-sided fixed modes. May be +inf.
    double fixed = std::numeric_limits<double>::infinity();
};

enum class Decision { H0, H0_bar };

struct DetectionReport {
    Decision decision = Decision::H0;
    DetectionMode mode = DetectionMode::upper;
    double eta = 0.0;
    int N = 0;
    int n = 0;
    double ratio = 0.0;
    double stat_largest = std::numeric_limits<double>::quiet_NaN();   // lambda'_1
    double stat_smallest = std::numeric_limits<double>::quiet_NaN();  // lambda'_N
    double threshold_largest = std::numeric_limits<double>::infinity();
    double threshold_smallest = std::numeric_limits<double>::infinity();
    int outlier_count_upper = 0;
    int outlier_count_lower = 0;
};

/// N^{2/3} (lambda_1 - (1 + sqrt cN)^2) / ((1 + sqrt cN)^{4/3} cN^{1/2}).
double scale_largest(double lambda1, int N, double cN);
/// N^{2/3} (lambda_N - (1 - sqrt cN)^2) / (-(1 - sqrt cN)^{4/3} cN^{1/2}).
double scale_smallest(double lambdaN, int N, double cN);

/// Thresholds on (lambda'_1, lambda'_N) for the configured test; +inf means
/// the statistic is not used. Throws ConfigError when undefined.
struct Thresholds {
    double largest = std::numeric_limits<double>::infinity();
    double smallest = std::numeric_limits<double>::infinity();
};
Thresholds detection_thresholds(const DetectionConfig& config);

/// Decision from the extreme eigenvalues alone.
DetectionReport detect_extremes(double lambda1, double lambdaN, int N, int n, const DetectionConfig& config);

/// Full test on a spectrum, including outlier counts.
DetectionReport detect(const SpikeSpectrum& spectrum, const DetectionConfig& config);

struct Observability {
    std::optional<double> c_plus;
    std::optional<double> c_minus;
    std::optional<int> n_min_upper;  // ceil(N / c_plus)
    std::optional<int> n_min_lower;  // ceil(N / c_minus)
    std::optional<int> worst_upper;  // index into the scenario list
    std::optional<int> worst_lower;
};

/// c_+ = min_k omega_{k,1}^2 over scenarios with a positive spike,
/// c_- = min_k omega_{k,t_k}^2 over scenarios with a negative spike.
Observability observability_thresholds(const std::vector<FailureScenario>& scenarios, int N);

}  // namespace spike
