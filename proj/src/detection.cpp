#include "spike/detection.hpp"

#include <cmath>

#include "spike/errors.hpp"
#include "spike/tracy_widom.hpp"

namespace spike {

std::string to_string(DetectionMode m) {
    switch (m) {
        case DetectionMode::upper: return "upper";
        case DetectionMode::lower: return "lower";
        case DetectionMode::two_sided_fixed_b: return "two_sided_fixed_b";
        case DetectionMode::two_sided_fixed_a: return "two_sided_fixed_a";
        case DetectionMode::two_sided_symmetric: return "two_sided_symmetric";
    }
    return "upper";
}

DetectionMode parse_detection_mode(const std::string& s) {
    if (s == "upper") return DetectionMode::upper;
    if (s == "lower") return DetectionMode::lower;
    if (s == "two_sided_fixed_b") return DetectionMode::two_sided_fixed_b;
    if (s == "two_sided_fixed_a") return DetectionMode::two_sided_fixed_a;
    if (s == "two_sided_symmetric") return DetectionMode::two_sided_symmetric;
    throw ConfigError("unknown detection mode '" + s + "'");
}

namespace {

void check_ratio(int N, double cN) {
    if (N < 1) throw ConfigError("dimension must be positive");
    if (!(cN > 0.0) || !(cN < 1.0)) throw ConfigError("ratio c_N = N/n must lie in (0, 1), got " + std::to_string(cN));
}

}  // namespace

double scale_largest(double lambda1, int N, double cN) {
    check_ratio(N, cN);
    const double sc = std::sqrt(cN);
    const double edge = (1.0 + sc) * (1.0 + sc);
    return std::pow(N, 2.0 / 3.0) * (lambda1 - edge) / (std::pow(1.0 + sc, 4.0 / 3.0) * sc);
}

double scale_smallest(double lambdaN, int N, double cN) {
    check_ratio(N, cN);
    const double sc = std::sqrt(cN);
    const double edge = (1.0 - sc) * (1.0 - sc);
    return std::pow(N, 2.0 / 3.0) * (lambdaN - edge) / (-std::pow(1.0 - sc, 4.0 / 3.0) * sc);
}

Thresholds detection_thresholds(const DetectionConfig& config) {
    const double eta = config.eta;
    if (!(eta > 0.0) || !(eta < 1.0)) throw ConfigError("false alarm rate must lie in (0, 1)");
    Thresholds t;
    auto coupled = [&](double fixed) {
        const double F = tw2_cdf(fixed);
        const double p = (1.0 - eta) / F;
        if (!(p < 1.0)) {
            throw ConfigError("threshold undefined: (1 - eta) / T2(" + std::to_string(fixed) + ") >= 1");
        }
        return tw2_quantile(p);
    };
    switch (config.mode) {
        case DetectionMode::upper:
            t.largest = tw2_quantile(1.0 - eta);
            break;
        case DetectionMode::lower:
            t.smallest = tw2_quantile(1.0 - eta);
            break;
        case DetectionMode::two_sided_fixed_b:
            t.smallest = config.fixed;
            t.largest = coupled(config.fixed);
            break;
        case DetectionMode::two_sided_fixed_a:
            t.largest = config.fixed;
            t.smallest = coupled(config.fixed);
            break;
        case DetectionMode::two_sided_symmetric:
            t.largest = t.smallest = tw2_quantile(std::sqrt(1.0 - eta));
            break;
    }
    return t;
}

DetectionReport detect_extremes(double lambda1, double lambdaN, int N, int n, const DetectionConfig& config) {
    if (n < 1) throw ConfigError("sample count must be positive");
    const double cN = static_cast<double>(N) / n;
    const Thresholds t = detection_thresholds(config);
    DetectionReport r;
    r.mode = config.mode;
    r.eta = config.eta;
    r.N = N;
    r.n = n;
    r.ratio = cN;
    r.threshold_largest = t.largest;
    r.threshold_smallest = t.smallest;
    r.stat_largest = scale_largest(lambda1, N, cN);
    r.stat_smallest = scale_smallest(lambdaN, N, cN);
    const bool fire = r.stat_largest > t.largest || r.stat_smallest > t.smallest;
    r.decision = fire ? Decision::H0_bar : Decision::H0;
    return r;
}

DetectionReport detect(const SpikeSpectrum& spectrum, const DetectionConfig& config) {
    const int N = spectrum.dimension();
    DetectionReport r = detect_extremes(spectrum.largest(), spectrum.smallest(), N, spectrum.samples(), config);
    // Outliers: eigenvalues whose own scaled statistic clears the one-sided
    // 1 - eta quantile.
    const double q = tw2_quantile(1.0 - config.eta);
    const auto& ev = spectrum.eigenvalues();
    for (int i = 0; i < N && scale_largest(ev(i), N, r.ratio) > q; ++i) ++r.outlier_count_upper;
    for (int i = N - 1; i >= 0 && scale_smallest(ev(i), N, r.ratio) > q; --i) ++r.outlier_count_lower;
    return r;
}

Observability observability_thresholds(const std::vector<FailureScenario>& scenarios, int N) {
    if (scenarios.empty()) throw DomainError("scenario list is empty");
    Observability o;
    for (std::size_t k = 0; k < scenarios.size(); ++k) {
        if (auto w = scenarios[k].largest_positive()) {
            if (!o.c_plus || *w * *w < *o.c_plus) {
                o.c_plus = *w * *w;
                o.worst_upper = static_cast<int>(k);
            }
        }
        if (auto w = scenarios[k].most_negative()) {
            if (!o.c_minus || *w * *w < *o.c_minus) {
                o.c_minus = *w * *w;
                o.worst_lower = static_cast<int>(k);
            }
        }
    }
    if (o.c_plus) o.n_min_upper = static_cast<int>(std::ceil(N / *o.c_plus));
    if (o.c_minus) o.n_min_lower = static_cast<int>(std::ceil(N / *o.c_minus));
    return o;
}

}  // namespace spike
