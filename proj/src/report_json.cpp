#include "spike/report_json.hpp"

#include <cmath>

#include "json.hpp"
#include "spike/errors.hpp"

namespace spike {

using nlohmann::ordered_json;

namespace {

ordered_json num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

double num(const ordered_json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "nan") return std::nan("");
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw ConfigError("bad number '" + s + "'");
    }
    return j.get<double>();
}

bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

LocalizationMethod parse_method(const std::string& s) {
    if (s == "likelihood") return LocalizationMethod::likelihood;
    if (s == "projection_only") return LocalizationMethod::projection_only;
    if (s == "unknown_amplitude") return LocalizationMethod::unknown_amplitude;
    throw ConfigError("unknown localization method '" + s + "'");
}

LocalizationStatus parse_status(const std::string& s) {
    if (s == "ok") return LocalizationStatus::ok;
    if (s == "inconclusive") return LocalizationStatus::inconclusive;
    if (s == "not_estimable") return LocalizationStatus::not_estimable;
    throw ConfigError("unknown localization status '" + s + "'");
}

}  // namespace

std::string to_json(const DetectionReport& r) {
    ordered_json j;
    j["decision"] = r.decision == Decision::H0_bar ? "H0_bar" : "H0";
    j["mode"] = to_string(r.mode);
    j["eta"] = num(r.eta);
    j["N"] = r.N;
    j["n"] = r.n;
    j["ratio"] = num(r.ratio);
    j["stat_largest"] = num(r.stat_largest);
    j["stat_smallest"] = num(r.stat_smallest);
    j["threshold_largest"] = num(r.threshold_largest);
    j["threshold_smallest"] = num(r.threshold_smallest);
    j["outlier_count_upper"] = r.outlier_count_upper;
    j["outlier_count_lower"] = r.outlier_count_lower;
    return j.dump(2);
}

DetectionReport detection_report_from_json(const std::string& text) {
    try {
        const auto j = ordered_json::parse(text);
        DetectionReport r;
        const auto d = j.at("decision").get<std::string>();
        if (d != "H0" && d != "H0_bar") throw ConfigError("bad decision '" + d + "'");
        r.decision = d == "H0_bar" ? Decision::H0_bar : Decision::H0;
        r.mode = parse_detection_mode(j.at("mode").get<std::string>());
        r.eta = num(j.at("eta"));
        r.N = j.at("N").get<int>();
        r.n = j.at("n").get<int>();
        r.ratio = num(j.at("ratio"));
        r.stat_largest = num(j.at("stat_largest"));
        r.stat_smallest = num(j.at("stat_smallest"));
        r.threshold_largest = num(j.at("threshold_largest"));
        r.threshold_smallest = num(j.at("threshold_smallest"));
        r.outlier_count_upper = j.at("outlier_count_upper").get<int>();
        r.outlier_count_lower = j.at("outlier_count_lower").get<int>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed detection report: ") + e.what());
    }
}

std::string to_json(const LocalizationReport& r, const std::vector<std::string>& labels) {
    ordered_json j;
    j["status"] = to_string(r.status);
    j["method"] = to_string(r.method);
    j["chosen"] = r.chosen;
    if (r.chosen >= 0 && r.chosen < static_cast<int>(labels.size())) j["chosen_label"] = labels[r.chosen];
    j["scores"] = ordered_json::array();
    for (double s : r.scores) j["scores"].push_back(num(s));
    j["subset"] = r.subset;
    j["message"] = r.message;
    j["omega_hat"] = num(r.omega_hat);
    j["zeta_hat"] = num(r.zeta_hat);
    if (!labels.empty()) j["labels"] = labels;
    return j.dump(2);
}

LocalizationReport localization_report_from_json(const std::string& text) {
    try {
        const auto j = ordered_json::parse(text);
        LocalizationReport r;
        r.status = parse_status(j.at("status").get<std::string>());
        r.method = parse_method(j.at("method").get<std::string>());
        r.chosen = j.at("chosen").get<int>();
        for (const auto& s : j.at("scores")) r.scores.push_back(num(s));
        r.subset = j.at("subset").get<std::vector<int>>();
        r.message = j.at("message").get<std::string>();
        r.omega_hat = num(j.at("omega_hat"));
        r.zeta_hat = num(j.at("zeta_hat"));
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed localization report: ") + e.what());
    }
}

bool operator==(const DetectionReport& a, const DetectionReport& b) {
    return a.decision == b.decision && a.mode == b.mode && same(a.eta, b.eta) && a.N == b.N && a.n == b.n &&
           same(a.ratio, b.ratio) && same(a.stat_largest, b.stat_largest) && same(a.stat_smallest, b.stat_smallest) &&
           same(a.threshold_largest, b.threshold_largest) && same(a.threshold_smallest, b.threshold_smallest) &&
           a.outlier_count_upper == b.outlier_count_upper && a.outlier_count_lower == b.outlier_count_lower;
}

bool operator==(const LocalizationReport& a, const LocalizationReport& b) {
    if (a.scores.size() != b.scores.size()) return false;
    for (std::size_t i = 0; i < a.scores.size(); ++i) {
        if (!same(a.scores[i], b.scores[i])) return false;
    }
    return a.status == b.status && a.method == b.method && a.chosen == b.chosen && a.subset == b.subset &&
           a.message == b.message && same(a.omega_hat, b.omega_hat) && same(a.zeta_hat, b.zeta_hat);
}

}  // namespace spike
