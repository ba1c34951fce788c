#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spike/failure_models.hpp"
#include "spike/sim_harness.hpp"

namespace spike {

/// Network plus an ordered hypothesis list built from provenance entries.
struct Catalog {
    NetworkModel model;
    std::vector<FailureScenario> scenarios;
    /// Unit eigenvectors of rank-one parameter-change hypotheses (empty
    /// otherwise); used by unknown-amplitude localization.
    std::vector<Eigen::VectorXcd> directions;

    std::vector<std::string> labels() const;
};

/// Catalog document:
///   {"network": "<spec path>" | {"spec": path} | {"ring_lattice": {...}},
///    "scenarios": [{"type": "node_failure", "nodes": [..] | "all", "sigma": [..]},
///                  {"type": "param_change", "params": [..] | "all", "beta": x | [..]}]}
/// Each listed id gives its own single-failure hypothesis unless "joint" is
/// true, in which case the whole list forms one simultaneous failure.
/// Ids are 1-based, "all" lists every node (parameter). Relative paths resolve
/// against base_dir.
Catalog parse_catalog(const std::string& text, const std::filesystem::path& base_dir);
Catalog load_catalog(const std::filesystem::path& path);

struct ExperimentConfig {
    enum class Kind { histogram, sweep };
    Kind kind = Kind::sweep;
    std::string name;
    HistogramConfig histogram;
    SweepConfig sweep;
    std::vector<std::string> labels;
};

/// Experiment document; see README for the schema.
ExperimentConfig parse_experiment(const std::string& text, const std::filesystem::path& base_dir);
ExperimentConfig load_experiment(const std::filesystem::path& path);

/// Directory holding the shipped data files (tw2 table, network specs, presets).
std::filesystem::path data_dir();
/// Shipped preset for figure 1, 3, 4 or 5.
std::filesystem::path preset_path(int figure);

}  // namespace spike
