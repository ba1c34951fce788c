// spike: command-line front end for the spiked-model detection library.
//
// Exit codes: 0 success (detect: H0), 10 detect decided H0_bar, 4 localization
// inconclusive, 2 bad flags / input / config, 3 domain error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "spike/detection.hpp"
#include "spike/errors.hpp"
#include "spike/experiment.hpp"
#include "spike/fluctuation.hpp"
#include "spike/localization.hpp"
#include "spike/matrix_io.hpp"
#include "spike/report_json.hpp"
#include "spike/sim_harness.hpp"
#include "spike/spectral_law.hpp"
#include "spike/spectrum.hpp"
#include "spike/spike_algebra.hpp"
#include "spike/tracy_widom.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;
constexpr int kExitInconclusive = 4;
constexpr int kExitFailure = 10;

// Six decimals with trailing zeros removed: 2.25, 0.777778, 1.832107.
std::string fmt(double x) {
    if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    std::string s(buf);
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    if (s == "-0") s = "0";
    return s;
}

struct LawArgs {
    double c = 0.125;
    std::optional<double> m_at;
    bool edges = false;
    bool rho = false;
    bool fluct = false;
    std::optional<double> omega;
    std::optional<double> lambda;
};

int run_law(const LawArgs& a) {
    bool printed = false;
    if (a.edges) {
        const auto e = spike::mp_edges(a.c);
        std::cout << "a=" << fmt(e.lower) << " b=" << fmt(e.upper) << '\n';
        printed = true;
    }
    if (a.m_at) {
        const spike::MarchenkoPastur law(a.c);
        const double x = *a.m_at;
        const auto e = law.edges();
        std::cout << "m=" << fmt(law.stieltjes(x).real()) << " h=" << fmt(law.h(x)) << " h'=" << fmt(law.h_prime(x))
                  << " a=" << fmt(e.lower) << " b=" << fmt(e.upper) << '\n';
        printed = true;
    }
    if (a.rho || a.fluct) {
        if (!a.omega) throw spike::ConfigError("--rho and --fluct need --omega");
        const double rho = spike::rho_of_omega_mp(*a.omega, a.c);
        const double zeta = spike::zeta_mp(*a.omega, a.c);
        if (a.rho) std::cout << "rho=" << fmt(rho) << " zeta=" << fmt(zeta) << '\n';
        if (a.fluct) {
            const auto C = spike::c_matrix_mp(*a.omega, a.c);
            std::cout << "C11=" << fmt(C(0, 0)) << " C12=" << fmt(C(0, 1)) << " C22=" << fmt(C(1, 1)) << '\n';
        }
        printed = true;
    }
    if (a.lambda) {
        std::cout << "omega_hat=" << fmt(spike::omega_hat_from_lambda(*a.lambda, a.c)) << '\n';
        printed = true;
    }
    if (!printed) throw spike::ConfigError("law: nothing requested (use --edges, --m-at, --rho, --fluct or --omega-hat)");
    return 0;
}

struct TwArgs {
    std::optional<double> cdf;
    std::optional<double> quantile;
    std::string generate;
    double step = 0.01;
};

int run_tw(const TwArgs& a) {
    if (!a.generate.empty()) {
        spike::Tw2Table::generate(-10.0, 6.0, a.step).save(a.generate);
        std::cout << "wrote " << a.generate << '\n';
        return 0;
    }
    if (!a.cdf && !a.quantile) throw spike::ConfigError("tw: use --cdf, --quantile or --generate");
    if (a.cdf) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.8f", spike::tw2_cdf(*a.cdf));
        std::cout << "F=" << buf << '\n';
    }
    if (a.quantile) {
        if (!(*a.quantile > 1e-12 && *a.quantile < 1.0 - 1e-12)) throw spike::DomainError("quantile level must lie in (1e-12, 1 - 1e-12)");
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.8f", spike::tw2_quantile(*a.quantile));
        std::cout << "s=" << buf << '\n';
    }
    return 0;
}

int run_network(const std::string& spec_path) {
    const auto spec = spike::load_network_spec(spec_path);
    const auto model = spike::network_from_spec(spec);
    nlohmann::ordered_json j;
    j["N"] = model.N;
    j["sigma2"] = model.sigma2;
    j["warnings"] = model.warnings;
    j["nodes"] = nlohmann::ordered_json::array();
    std::vector<spike::FailureScenario> scenarios;
    for (int k = 0; k < model.N; ++k) {
        auto sc = spike::node_failure_scenario(model, {k});
        nlohmann::ordered_json node;
        node["id"] = k + 1;
        node["variance"] = model.R(k, k).real();
        node["failure_variance"] = spike::default_failure_variance(model, k);
        node["omegas"] = nlohmann::ordered_json::array();
        for (const auto& s : sc.spikes) node["omegas"].push_back(s.omega);
        j["nodes"].push_back(node);
        scenarios.push_back(std::move(sc));
    }
    const auto obs = spike::observability_thresholds(scenarios, model.N);
    if (obs.c_plus) {
        j["c_plus"] = *obs.c_plus;
        j["n_min_upper"] = *obs.n_min_upper;
        j["worst_node"] = *obs.worst_upper + 1;
    }
    if (obs.c_minus) {
        j["c_minus"] = *obs.c_minus;
        j["n_min_lower"] = *obs.n_min_lower;
    }
    std::cout << j.dump(2) << '\n';
    for (const auto& w : model.warnings) std::cerr << "warning: " << w << '\n';
    return 0;
}

int run_scenario(const std::string& catalog_path) {
    const auto cat = spike::load_catalog(catalog_path);
    nlohmann::ordered_json j;
    j["N"] = cat.model.N;
    j["scenarios"] = nlohmann::ordered_json::array();
    for (const auto& sc : cat.scenarios) {
        nlohmann::ordered_json s;
        s["id"] = sc.id;
        s["label"] = sc.label;
        s["provenance"] = spike::to_string(sc.provenance);
        s["rank"] = sc.rank();
        s["spikes"] = nlohmann::ordered_json::array();
        for (const auto& sp : sc.spikes) s["spikes"].push_back({{"omega", sp.omega}, {"multiplicity", sp.multiplicity()}});
        j["scenarios"].push_back(s);
    }
    const auto obs = spike::observability_thresholds(cat.scenarios, cat.model.N);
    if (obs.c_plus) {
        j["c_plus"] = *obs.c_plus;
        j["n_min_upper"] = *obs.n_min_upper;
        j["worst_upper"] = *obs.worst_upper + 1;
    }
    if (obs.c_minus) {
        j["c_minus"] = *obs.c_minus;
        j["n_min_lower"] = *obs.n_min_lower;
        j["worst_lower"] = *obs.worst_lower + 1;
    }
    std::cout << j.dump(2) << '\n';
    return 0;
}

struct DetectArgs {
    std::string input;
    double eta = 0.01;
    std::string mode = "upper";
    std::optional<double> fixed;
};

int run_detect(const DetectArgs& a) {
    const auto sigma = spike::read_matrix(a.input);
    spike::DetectionConfig cfg;
    cfg.eta = a.eta;
    cfg.mode = spike::parse_detection_mode(a.mode);
    if (a.fixed) cfg.fixed = *a.fixed;
    const auto sp = spike::SpikeSpectrum::from_observation(sigma);
    const auto rep = spike::detect(sp, cfg);
    std::cout << spike::to_json(rep) << '\n';
    return rep.decision == spike::Decision::H0_bar ? kExitFailure : 0;
}

struct LocalizeArgs {
    std::string input;
    std::string catalog;
    int preselect = 0;
    bool unknown_amplitude = false;
    std::string side = "upper";
    int max_positive = -1;
    int max_negative = -1;
    bool no_eigenvalues = false;
};

int run_localize(const LocalizeArgs& a) {
    const auto cat = spike::load_catalog(a.catalog);
    const auto sigma = spike::read_matrix(a.input);
    if (sigma.rows() != cat.model.N) throw spike::DomainError("observation has " + std::to_string(sigma.rows()) + " rows but the network has " + std::to_string(cat.model.N) + " nodes");
    spike::LocalizationReport rep;
    if (a.unknown_amplitude) {
        for (const auto& d : cat.directions) {
            if (d.size() == 0) throw spike::ConfigError("--unknown-amplitude needs rank-one parameter-change hypotheses");
        }
        if (a.side != "upper" && a.side != "lower") throw spike::ConfigError("--side must be upper or lower");
        const auto side = a.side == "upper" ? spike::Side::upper : spike::Side::lower;
        const auto sp = spike::SpikeSpectrum::from_observation(sigma, side == spike::Side::upper ? 1 : 0,
                                                               side == spike::Side::lower ? 1 : 0);
        rep = spike::localize_unknown_amplitude(sp, cat.directions, side);
    } else {
        int top = 0, bottom = 0;
        for (const auto& sc : cat.scenarios) {
            int pos = 0, neg = 0;
            for (const auto& s : sc.spikes) (s.omega > 0 ? pos : neg) += s.multiplicity();
            top = std::max(top, pos);
            bottom = std::max(bottom, neg);
        }
        const auto sp = spike::SpikeSpectrum::from_observation(sigma, top, bottom);
        spike::LocalizeOptions opts;
        opts.preselect = a.preselect;
        opts.use_eigenvalues = !a.no_eigenvalues;
        opts.stats.max_positive_spikes = a.max_positive;
        opts.stats.max_negative_spikes = a.max_negative;
        rep = spike::localize_known(sp, cat.scenarios, opts);
    }
    std::cout << spike::to_json(rep, cat.labels()) << '\n';
    if (rep.status == spike::LocalizationStatus::not_estimable) {
        std::cerr << "error: " << rep.message << '\n';
        return kExitDomain;
    }
    return rep.status == spike::LocalizationStatus::inconclusive ? kExitInconclusive : 0;
}

struct SimulateArgs {
    std::string config;
    int figure = 0;
    std::string out;
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<double> omega;
    // Single observation draw.
    std::string sample_out;
    int N = 256;
    int n = 2048;
    std::string catalog;
    int truth = 0;
    bool single = false;
};

int run_sample(const SimulateArgs& a) {
    spike::FailureScenario scenario;
    int N = a.N;
    if (!a.catalog.empty()) {
        const auto cat = spike::load_catalog(a.catalog);
        N = cat.model.N;
        if (a.truth < 0 || a.truth > static_cast<int>(cat.scenarios.size())) throw spike::ConfigError("--truth out of range");
        if (a.truth > 0) scenario = cat.scenarios[a.truth - 1];
    } else if (a.omega) {
        spike::ScenarioSpike s;
        s.omega = *a.omega;
        s.basis = Eigen::MatrixXcd::Zero(N, 1);
        s.basis(0, 0) = 1.0;
        scenario = spike::explicit_scenario({s});
    }
    spike::Rng rng(spike::trial_seed(a.seed.value_or(1), a.n, 0.0, 0));
    const auto sigma = spike::sample_observation(scenario, N, a.n, rng);
    spike::write_matrix(a.sample_out, sigma, a.single ? spike::MatrixPrecision::complex64 : spike::MatrixPrecision::complex128);
    return 0;
}

int run_simulate(const SimulateArgs& a) {
    if (!a.sample_out.empty()) return run_sample(a);
    if (a.config.empty() == (a.figure == 0)) throw spike::ConfigError("simulate: give exactly one of --config or --figure");
    const std::filesystem::path cfg_path = a.figure ? spike::preset_path(a.figure) : std::filesystem::path(a.config);
    auto cfg = spike::load_experiment(cfg_path);
    std::string out = a.out;
    if (cfg.kind == spike::ExperimentConfig::Kind::histogram) {
        auto& h = cfg.histogram;
        if (a.trials) h.trials = *a.trials;
        if (a.seed) h.seed = *a.seed;
        if (a.threads) h.threads = *a.threads;
        if (a.omega) h.omega = *a.omega;
        if (out.empty()) out = "histogram.txt";
        const auto res = spike::run_histogram_experiment(h);
        std::ofstream samples(out);
        std::ofstream sidecar(out + ".json");
        if (!samples || !sidecar) throw spike::IoError("cannot write " + out);
        spike::write_histogram(samples, sidecar, res);
        std::cerr << "wrote " << res.projection.size() << " samples to " << out << " (sidecar " << out << ".json)\n";
        return 0;
    }
    auto& s = cfg.sweep;
    if (a.trials) s.trials = *a.trials;
    if (a.seed) s.seed = *a.seed;
    if (a.threads) s.threads = *a.threads;
    const auto res = spike::run_detection_localization_sweep(s);
    if (out.empty() || out == "-") {
        spike::write_csv(std::cout, res);
    } else {
        std::ofstream f(out);
        if (!f) throw spike::IoError("cannot write " + out);
        spike::write_csv(f, res);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spiked random matrix statistics and sensor-network failure diagnosis"};
    app.require_subcommand(1);

    LawArgs law;
    auto* law_cmd = app.add_subcommand("law", "Marchenko-Pastur law and spike maps");
    law_cmd->add_option("--c", law.c, "Ratio c = N/n in (0,1)");
    law_cmd->add_option("--m-at", law.m_at, "Print m, h, h' and the edges at x");
    law_cmd->add_flag("--edges", law.edges, "Print the support edges");
    law_cmd->add_flag("--rho", law.rho, "Print rho and zeta for --omega");
    law_cmd->add_flag("--fluct", law.fluct, "Print the C matrix for --omega");
    law_cmd->add_option("--omega", law.omega, "Spike eigenvalue");
    law_cmd->add_option("--omega-hat", law.lambda, "Invert an outlier eigenvalue to omega");

    TwArgs tw;
    auto* tw_cmd = app.add_subcommand("tw", "Tracy-Widom (beta=2) CDF and quantiles");
    tw_cmd->add_option("--cdf", tw.cdf, "Evaluate F(s)");
    tw_cmd->add_option("--quantile", tw.quantile, "Evaluate F^{-1}(p)");
    tw_cmd->add_option("--generate", tw.generate, "Write a fresh table to this path");
    tw_cmd->add_option("--step", tw.step, "Grid spacing for --generate");

    std::string spec_path;
    auto* net_cmd = app.add_subcommand("network", "Reconstruct a network and list node-failure spikes");
    net_cmd->add_option("--spec", spec_path, "Network spec JSON")->required();

    std::string catalog_path;
    auto* sc_cmd = app.add_subcommand("scenario", "List the hypotheses of a scenario catalog");
    sc_cmd->add_option("--catalog", catalog_path, "Scenario catalog JSON")->required();

    DetectArgs det;
    auto* det_cmd = app.add_subcommand("detect", "Failure detection on an observation matrix");
    det_cmd->add_option("--input", det.input, "Observation matrix file")->required();
    det_cmd->add_option("--eta", det.eta, "False alarm rate");
    det_cmd->add_option("--mode", det.mode, "upper|lower|two_sided_fixed_b|two_sided_fixed_a|two_sided_symmetric");
    det_cmd->add_option("--fixed", det.fixed, "Fixed threshold of the two-sided fixed modes");

    LocalizeArgs loc;
    auto* loc_cmd = app.add_subcommand("localize", "Failure localization on an observation matrix");
    loc_cmd->add_option("--input", loc.input, "Observation matrix file")->required();
    loc_cmd->add_option("--catalog", loc.catalog, "Scenario catalog JSON")->required();
    loc_cmd->add_option("--preselect", loc.preselect, "Keep the L hypotheses closest to lambda_1 (0 = all)");
    loc_cmd->add_flag("--unknown-amplitude", loc.unknown_amplitude, "Minimum-distance estimator");
    loc_cmd->add_option("--side", loc.side, "upper|lower (unknown amplitude)");
    loc_cmd->add_option("--max-positive-spikes", loc.max_positive, "Use at most this many positive spikes");
    loc_cmd->add_option("--max-negative-spikes", loc.max_negative, "Use at most this many negative spikes");
    loc_cmd->add_flag("--no-eigenvalues", loc.no_eigenvalues, "Score projections only");

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo experiments");
    sim_cmd->add_option("--config", sim.config, "Experiment config JSON");
    sim_cmd->add_option("--figure", sim.figure, "Shipped preset (1, 3, 4 or 5)");
    sim_cmd->add_option("--out", sim.out, "Output CSV or histogram path");
    sim_cmd->add_option("--trials", sim.trials, "Override trial count");
    sim_cmd->add_option("--seed", sim.seed, "Override base seed");
    sim_cmd->add_option("--threads", sim.threads, "Worker count");
    sim_cmd->add_option("--omega", sim.omega, "Histogram spike / sampled rank-one spike");
    sim_cmd->add_option("--sample-out", sim.sample_out, "Draw one observation matrix to this file");
    sim_cmd->add_option("--N", sim.N, "Dimension of the sampled observation");
    sim_cmd->add_option("--n", sim.n, "Samples of the sampled observation");
    sim_cmd->add_option("--catalog", sim.catalog, "Sample under a catalog hypothesis");
    sim_cmd->add_option("--truth", sim.truth, "1-based catalog hypothesis (0 = H0)");
    sim_cmd->add_flag("--complex64", sim.single, "Write single precision");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*law_cmd) return run_law(law);
        if (*tw_cmd) return run_tw(tw);
        if (*net_cmd) return run_network(spec_path);
        if (*sc_cmd) return run_scenario(catalog_path);
        if (*det_cmd) return run_detect(det);
        if (*loc_cmd) return run_localize(loc);
        if (*sim_cmd) return run_simulate(sim);
    } catch (const spike::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const spike::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
