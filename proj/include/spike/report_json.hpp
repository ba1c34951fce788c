#pragma once

#include <string>
#include <vector>

#include "spike/detection.hpp"
#include "spike/localization.hpp"

namespace spike {

// Non-finite numbers are written as the strings "inf", "-inf" and "nan" so
// that parsing a printed report gives back the same report.

std::string to_json(const DetectionReport& r);
DetectionReport detection_report_from_json(const std::string& text);

/// `labels` (optional) are attached per hypothesis and ignored when parsing.
std::string to_json(const LocalizationReport& r, const std::vector<std::string>& labels = {});
LocalizationReport localization_report_from_json(const std::string& text);

bool operator==(const DetectionReport& a, const DetectionReport& b);
bool operator==(const LocalizationReport& a, const LocalizationReport& b);

}  // namespace spike
