#include "spike/experiment.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "spike/errors.hpp"

namespace spike {

using nlohmann::json;

namespace {

std::string read_text(const std::filesystem::path& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw IoError(std::string("cannot open ") + what + " " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
    return p.is_absolute() ? p : base / p;
}

NetworkModel network_from_json(const json& j, const std::filesystem::path& base) {
    if (j.is_string()) return network_from_spec(load_network_spec(resolve(j.get<std::string>(), base)));
    if (j.contains("spec")) return network_from_spec(load_network_spec(resolve(j.at("spec").get<std::string>(), base)));
    if (j.contains("ring_lattice")) {
        const auto& r = j.at("ring_lattice");
        return network_from_spec(ring_lattice_spec(r.at("N").get<int>(), r.value("neighbors", 8),
                                                   r.value("seed", std::uint64_t{1}), r.value("sigma2", 0.01)));
    }
    throw ConfigError("network must be a spec path, {\"spec\": path} or {\"ring_lattice\": {...}}");
}

std::vector<int> id_list(const json& j, int count, const char* what) {
    std::vector<int> out;
    if (j.is_string() && j.get<std::string>() == "all") {
        for (int i = 0; i < count; ++i) out.push_back(i);
        return out;
    }
    for (const auto& v : j) {
        const int id = v.get<int>();
        if (id < 1 || id > count) throw ConfigError(std::string(what) + " id " + std::to_string(id) + " out of range");
        out.push_back(id - 1);
    }
    return out;
}

void append_scenarios(Catalog& cat, const json& entry) {
    const auto type = entry.at("type").get<std::string>();
    const bool joint = entry.value("joint", false);
    if (type == "node_failure") {
        const auto& key = entry.contains("nodes") ? entry.at("nodes") : json("all");
        const auto nodes = id_list(key, cat.model.N, "node");
        std::vector<double> sigma;
        if (entry.contains("sigma")) sigma = entry.at("sigma").get<std::vector<double>>();
        if (!joint) {
            if (!sigma.empty() && sigma.size() != nodes.size()) throw ConfigError("one sigma per node required");
            for (std::size_t m = 0; m < nodes.size(); ++m) {
                std::vector<double> s;
                if (!sigma.empty()) s.push_back(sigma[m]);
                cat.scenarios.push_back(node_failure_scenario(cat.model, {nodes[m]}, s));
                cat.directions.emplace_back();
            }
        } else {
            cat.scenarios.push_back(node_failure_scenario(cat.model, nodes, sigma));
            cat.directions.emplace_back();
        }
    } else if (type == "param_change") {
        const auto& key = entry.contains("params") ? entry.at("params") : json("all");
        const auto params = id_list(key, cat.model.p, "parameter");
        std::vector<double> beta;
        if (entry.at("beta").is_number()) {
            beta.assign(params.size(), entry.at("beta").get<double>());
        } else {
            beta = entry.at("beta").get<std::vector<double>>();
        }
        if (beta.size() != params.size()) throw ConfigError("one beta per parameter required");
        if (!joint) {
            for (std::size_t m = 0; m < params.size(); ++m) {
                cat.scenarios.push_back(param_change_scenario(cat.model, {params[m]}, {beta[m]}));
                cat.directions.push_back(param_change_direction(cat.model, params[m]));
            }
        } else {
            cat.scenarios.push_back(param_change_scenario(cat.model, params, beta));
            cat.directions.emplace_back();
        }
    } else {
        throw ConfigError("unknown scenario type '" + type + "'");
    }
}

Catalog catalog_from_json(const json& doc, const std::filesystem::path& base) {
    Catalog cat;
    cat.model = network_from_json(doc.at("network"), base);
    const auto& sc = doc.at("scenarios");
    if (sc.is_object()) {
        append_scenarios(cat, sc);
    } else {
        for (const auto& e : sc) append_scenarios(cat, e);
    }
    if (cat.scenarios.empty()) throw ConfigError("catalog has no scenarios");
    for (std::size_t k = 0; k < cat.scenarios.size(); ++k) cat.scenarios[k].id = static_cast<int>(k) + 1;
    return cat;
}

int resolve_truth(const json& j, const Catalog& cat) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "H0") return -1;
        if (s == "worst") {
            int worst = -1;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < cat.scenarios.size(); ++k) {
                if (auto w = cat.scenarios[k].largest_positive(); w && *w < best) {
                    best = *w;
                    worst = static_cast<int>(k);
                }
            }
            if (worst < 0) throw ConfigError("no hypothesis has a positive spike");
            return worst;
        }
        throw ConfigError("truth must be a 1-based hypothesis index, \"H0\" or \"worst\"");
    }
    const int k = j.get<int>();
    if (k == 0) return -1;
    if (k < 1 || k > static_cast<int>(cat.scenarios.size())) throw ConfigError("truth index out of range");
    return k - 1;
}

}  // namespace

std::vector<std::string> Catalog::labels() const {
    std::vector<std::string> out;
    for (const auto& s : scenarios) out.push_back(s.label);
    return out;
}

Catalog parse_catalog(const std::string& text, const std::filesystem::path& base_dir) {
    try {
        return catalog_from_json(json::parse(text), base_dir);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed catalog: ") + e.what());
    }
}

Catalog load_catalog(const std::filesystem::path& path) {
    return parse_catalog(read_text(path, "catalog"), path.parent_path());
}

ExperimentConfig parse_experiment(const std::string& text, const std::filesystem::path& base_dir) {
    ExperimentConfig cfg;
    try {
        const json doc = json::parse(text);
        cfg.name = doc.value("name", std::string{});
        const auto kind = doc.value("kind", std::string("sweep"));
        if (kind == "histogram") {
            cfg.kind = ExperimentConfig::Kind::histogram;
            auto& h = cfg.histogram;
            h.N = doc.value("N", h.N);
            h.n = doc.value("n", h.n);
            h.omega = doc.value("omega", h.omega);
            h.trials = doc.value("trials", h.trials);
            h.seed = doc.value("seed", h.seed);
            if (h.N < 1 || h.n <= h.N) throw ConfigError("histogram needs 1 <= N < n");
            return cfg;
        }
        if (kind != "sweep") throw ConfigError("unknown experiment kind '" + kind + "'");
        cfg.kind = ExperimentConfig::Kind::sweep;
        auto& s = cfg.sweep;
        Catalog cat;
        if (doc.contains("network")) {
            cat = catalog_from_json(doc, base_dir);
            s.N = cat.model.N;
            s.truth = resolve_truth(doc.value("truth", json("worst")), cat);
        } else {
            s.N = doc.at("N").get<int>();
            s.truth = -1;
        }
        s.hypotheses = cat.scenarios;
        cfg.labels = cat.labels();
        s.n_grid = doc.at("n").get<std::vector<int>>();
        s.etas = doc.at("eta").get<std::vector<double>>();
        if (s.n_grid.empty() || s.etas.empty()) throw ConfigError("n grid and eta list must be nonempty");
        for (int n : s.n_grid) {
            if (n <= s.N) throw ConfigError("n must exceed N (c_N < 1), got n=" + std::to_string(n));
        }
        for (double eta : s.etas) {
            if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("eta must lie in (0, 1)");
        }
        s.trials = doc.value("trials", s.trials);
        if (s.trials < 1) throw ConfigError("trials must be at least 1");
        s.seed = doc.value("seed", s.seed);
        if (doc.contains("detection")) {
            const auto& d = doc.at("detection");
            s.detection.mode = parse_detection_mode(d.value("mode", std::string("upper")));
            if (d.contains("fixed")) s.detection.fixed = d.at("fixed").get<double>();
        }
        if (doc.contains("localization")) {
            const auto& l = doc.at("localization");
            s.known_amplitude = l.value("known_amplitude", true);
            s.unknown_amplitude = l.value("unknown_amplitude", false);
            s.localize.stats.max_positive_spikes = l.value("max_positive_spikes", -1);
            s.localize.stats.max_negative_spikes = l.value("max_negative_spikes", -1);
            s.localize.preselect = l.value("preselect", 0);
            s.localize.use_eigenvalues = l.value("use_eigenvalues", true);
            const auto side = l.value("side", std::string("upper"));
            if (side != "upper" && side != "lower") throw ConfigError("side must be upper or lower");
            s.side = side == "upper" ? Side::upper : Side::lower;
        }
        if (s.unknown_amplitude) {
            for (const auto& d : cat.directions) {
                if (d.size() == 0) throw ConfigError("unknown-amplitude localization needs rank-one parameter-change hypotheses");
            }
            s.directions = cat.directions;
        }
        if (doc.contains("time_correlation")) {
            const auto& t = doc.at("time_correlation");
            s.time_correlated = true;
            s.time_spectrum_min = t.value("min", 1.0);
            s.time_spectrum_max = t.value("max", 1.0);
            s.whiten = t.value("whiten", false);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed experiment config: ") + e.what());
    }
    return cfg;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
    return parse_experiment(read_text(path, "experiment config"), path.parent_path());
}

std::filesystem::path data_dir() {
    if (const char* env = std::getenv("SPIKE_DATA_DIR")) return env;
    return SPIKE_DEFAULT_DATA_DIR;
}

std::filesystem::path preset_path(int figure) {
    if (figure != 1 && figure != 3 && figure != 4 && figure != 5) {
        throw ConfigError("no preset for figure " + std::to_string(figure));
    }
    return data_dir() / "presets" / ("figure" + std::to_string(figure) + ".json");
}

}  // namespace spike
