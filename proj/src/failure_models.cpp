#include "spike/failure_models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "json.hpp"
#include "spike/errors.hpp"
#include "spike/linalg.hpp"
#include "spike/random.hpp"

namespace spike {

using nlohmann::json;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

NetworkSpec parse_network_spec(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("network spec is not valid JSON: ") + e.what());
    }
    NetworkSpec spec;
    try {
        if (doc.contains("sigma2_db")) {
            spec.sigma2 = db_to_linear(doc.at("sigma2_db").get<double>());
        } else if (doc.contains("sigma2")) {
            spec.sigma2 = doc.at("sigma2").get<double>();
        } else {
            throw ConfigError("network spec needs sigma2_db or sigma2");
        }
        if (!(spec.sigma2 > 0.0)) throw ConfigError("noise variance must be positive");

        const auto& nodes = doc.at("nodes");
        const int N = static_cast<int>(nodes.size());
        if (N == 0) throw ConfigError("network spec has no nodes");
        spec.variances.assign(N, std::nan(""));
        for (const auto& node : nodes) {
            const int id = node.at("id").get<int>();
            if (id < 1 || id > N) throw ConfigError("node id " + std::to_string(id) + " out of range 1.." + std::to_string(N));
            if (!std::isnan(spec.variances[id - 1])) throw ConfigError("duplicate node id " + std::to_string(id));
            spec.variances[id - 1] = node.at("variance").get<double>();
        }
        std::set<std::pair<int, int>> seen;
        if (doc.contains("edges")) {
            for (const auto& e : doc.at("edges")) {
                NetworkSpec::Edge edge{e.at("i").get<int>(), e.at("j").get<int>(), e.at("cov").get<double>()};
                if (edge.i < 1 || edge.i > N || edge.j < 1 || edge.j > N || edge.i == edge.j) {
                    throw ConfigError("invalid edge (" + std::to_string(edge.i) + "," + std::to_string(edge.j) + ")");
                }
                if (!seen.insert(std::minmax(edge.i, edge.j)).second) {
                    throw ConfigError("duplicate edge (" + std::to_string(edge.i) + "," + std::to_string(edge.j) + ")");
                }
                spec.edges.push_back(edge);
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed network spec: ") + e.what());
    }
    return spec;
}

NetworkSpec load_network_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open network spec " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_network_spec(ss.str());
}

std::string network_spec_to_json(const NetworkSpec& spec) {
    json doc;
    doc["sigma2"] = spec.sigma2;
    doc["nodes"] = json::array();
    for (std::size_t i = 0; i < spec.variances.size(); ++i) {
        doc["nodes"].push_back({{"id", static_cast<int>(i) + 1}, {"variance", spec.variances[i]}});
    }
    doc["edges"] = json::array();
    for (const auto& e : spec.edges) doc["edges"].push_back({{"i", e.i}, {"j", e.j}, {"cov", e.cov}});
    return doc.dump(2);
}

namespace {

Eigen::MatrixXcd inverse_sqrt(const Eigen::MatrixXcd& R) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(R);
    if (es.eigenvalues().minCoeff() <= 0.0) throw DomainError("covariance R is not positive definite");
    return hermitian_function(R, [](double x) { return 1.0 / std::sqrt(x); });
}

}  // namespace

NetworkModel network_from_spec(const NetworkSpec& spec) {
    const int N = static_cast<int>(spec.variances.size());
    if (N == 0) throw ConfigError("network spec has no nodes");
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i < N; ++i) R(i, i) = spec.variances[i];
    for (const auto& e : spec.edges) {
        R(e.i - 1, e.j - 1) = e.cov;
        R(e.j - 1, e.i - 1) = e.cov;
    }
    const Eigen::MatrixXd G = R - spec.sigma2 * Eigen::MatrixXd::Identity(N, N);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    const double norm = R.cwiseAbs().rowwise().sum().maxCoeff();
    const double tol = 1e-8 * norm;
    NetworkModel model;
    if (es.eigenvalues().minCoeff() < -tol) {
        throw DomainError("spec not PSD: R - sigma^2 I has eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
    }
    if (es.eigenvalues().minCoeff() < 0.0) {
        model.warnings.push_back("clipped negative eigenvalue " + std::to_string(es.eigenvalues().minCoeff()) +
                                 " of R - sigma^2 I to zero");
    }
    Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd H = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();

    model.N = N;
    model.p = N;
    model.H = H.cast<std::complex<double>>();
    model.sigma2 = spec.sigma2;
    // Keep the spec's entries exactly; H H* reproduces them up to rounding.
    model.R = R.cast<std::complex<double>>();
    model.R_inv_sqrt = inverse_sqrt(model.R);
    return model;
}

NetworkModel network_from_channel(const Eigen::MatrixXcd& H, double sigma2) {
    if (!(sigma2 > 0.0)) throw DomainError("noise variance must be positive");
    NetworkModel model;
    model.N = static_cast<int>(H.rows());
    model.p = static_cast<int>(H.cols());
    model.H = H;
    model.sigma2 = sigma2;
    model.R = H * H.adjoint();
    model.R.diagonal().array() += sigma2;
    model.R_inv_sqrt = inverse_sqrt(model.R);
    return model;
}

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::node_failure: return "node_failure";
        case Provenance::param_change: return "param_change";
        case Provenance::explicit_perturbation: return "explicit";
    }
    return "explicit";
}

int FailureScenario::dimension() const { return spikes.empty() ? 0 : static_cast<int>(spikes.front().basis.rows()); }

int FailureScenario::rank() const {
    int r = 0;
    for (const auto& s : spikes) r += s.multiplicity();
    return r;
}

Eigen::MatrixXcd FailureScenario::perturbation(int N) const {
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(N, N);
    for (const auto& s : spikes) P += s.omega * s.basis * s.basis.adjoint();
    return P;
}

std::vector<SpikeDescriptor> FailureScenario::descriptors(int N) const {
    std::vector<SpikeDescriptor> out;
    out.reserve(spikes.size());
    for (const auto& s : spikes) out.push_back({s.omega, s.multiplicity(), 0});
    assign_index_offsets(out, N);
    return out;
}

std::optional<double> FailureScenario::largest_positive() const {
    if (!spikes.empty() && spikes.front().omega > 0.0) return spikes.front().omega;
    return std::nullopt;
}

std::optional<double> FailureScenario::most_negative() const {
    if (!spikes.empty() && spikes.back().omega < 0.0) return spikes.back().omega;
    return std::nullopt;
}

FailureScenario scenario_from_perturbation(const Eigen::MatrixXcd& P, double group_tol) {
    const Eigen::MatrixXcd Ph = 0.5 * (P + P.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Ph);
    const Eigen::VectorXd& w = es.eigenvalues();
    const double norm = w.cwiseAbs().maxCoeff();
    FailureScenario sc;
    if (norm == 0.0) return sc;
    const double cut = 1e-10 * norm;
    // Eigen returns increasing eigenvalues; walk from the top.
    for (Eigen::Index i = w.size() - 1; i >= 0;) {
        if (std::abs(w(i)) <= cut) {
            --i;
            continue;
        }
        Eigen::Index j = i;
        while (j - 1 >= 0 && std::abs(w(j - 1)) > cut &&
               std::abs(w(j - 1) - w(i)) <= group_tol * std::max(1.0, std::abs(w(i)))) {
            --j;
        }
        ScenarioSpike s;
        s.omega = w.segment(j, i - j + 1).mean();
        if (s.omega <= -1.0) throw DomainError("scenario breaks positive definiteness: omega=" + std::to_string(s.omega));
        s.basis = es.eigenvectors().middleCols(j, i - j + 1).rowwise().reverse();
        sc.spikes.push_back(std::move(s));
        i = j - 1;
    }
    return sc;
}

FailureScenario explicit_scenario(std::vector<ScenarioSpike> spikes) {
    std::sort(spikes.begin(), spikes.end(), [](const auto& a, const auto& b) { return a.omega > b.omega; });
    Eigen::Index N = -1;
    Eigen::Index total = 0;
    for (const auto& s : spikes) {
        if (s.omega <= -1.0 || s.omega == 0.0) throw DomainError("spike omega must be > -1 and nonzero");
        if (s.basis.cols() < 1) throw DomainError("spike basis is empty");
        if (N >= 0 && s.basis.rows() != N) throw DomainError("spike bases have different dimensions");
        N = s.basis.rows();
        total += s.basis.cols();
    }
    if (!spikes.empty()) {
        Eigen::MatrixXcd U(N, total);
        Eigen::Index col = 0;
        for (const auto& s : spikes) {
            U.middleCols(col, s.basis.cols()) = s.basis;
            col += s.basis.cols();
        }
        const double err = (U.adjoint() * U - Eigen::MatrixXcd::Identity(total, total)).cwiseAbs().maxCoeff();
        if (err > 1e-10) throw DomainError("spike bases are not orthonormal");
    }
    FailureScenario sc;
    sc.spikes = std::move(spikes);
    sc.provenance = Provenance::explicit_perturbation;
    return sc;
}

double default_failure_variance(const NetworkModel& model, int node) {
    if (node < 0 || node >= model.N) throw DomainError("node index out of range");
    const Eigen::MatrixXcd G = model.gram();
    return G.row(node).sum().real();
}

FailureScenario node_failure_scenario(const NetworkModel& model, const std::vector<int>& nodes,
                                      std::vector<double> sigma_fail) {
    const int N = model.N;
    const int M = static_cast<int>(nodes.size());
    if (M == 0) throw DomainError("node list is empty");
    if (std::set<int>(nodes.begin(), nodes.end()).size() != nodes.size()) throw DomainError("node indices must be distinct");
    for (int k : nodes) {
        if (k < 0 || k >= N) throw DomainError("node index " + std::to_string(k) + " out of range");
    }
    if (sigma_fail.empty()) {
        for (int k : nodes) {
            const double v = default_failure_variance(model, k);
            if (v < 0.0) throw DomainError("default failure variance is negative");
            sigma_fail.push_back(std::sqrt(v));
        }
    }
    if (static_cast<int>(sigma_fail.size()) != M) throw DomainError("one failure amplitude per node required");
    for (double s : sigma_fail) {
        if (s < 0.0) throw DomainError("failure amplitudes must be nonnegative");
    }

    Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(N, M);
    Eigen::MatrixXcd Lambda2 = Eigen::MatrixXcd::Zero(M, M);
    for (int m = 0; m < M; ++m) {
        E(nodes[m], m) = 1.0;
        Lambda2(m, m) = sigma_fail[m] * sigma_fail[m];
    }
    const Eigen::MatrixXcd G = model.gram();
    const Eigen::MatrixXcd& Ri = model.R_inv_sqrt;
    const Eigen::MatrixXcd inner = (E.adjoint() * G * E + Lambda2) * E.adjoint() - E.adjoint() * G;
    const Eigen::MatrixXcd P = Ri * E * inner * Ri - Ri * G * E * E.adjoint() * Ri;

    FailureScenario sc = scenario_from_perturbation(P);
    sc.provenance = Provenance::node_failure;
    sc.indices = nodes;
    sc.amplitudes = std::move(sigma_fail);
    sc.label = "node";
    for (int k : nodes) sc.label += " " + std::to_string(k + 1);
    return sc;
}

FailureScenario param_change_scenario(const NetworkModel& model, const std::vector<int>& params,
                                      const std::vector<double>& beta) {
    const int M = static_cast<int>(params.size());
    if (M == 0) throw DomainError("parameter list is empty");
    if (static_cast<int>(beta.size()) != M) throw DomainError("one beta per parameter required");
    if (std::set<int>(params.begin(), params.end()).size() != params.size()) throw DomainError("parameter indices must be distinct");
    Eigen::MatrixXcd B(model.N, M);
    for (int m = 0; m < M; ++m) {
        if (params[m] < 0 || params[m] >= model.p) throw DomainError("parameter index out of range");
        B.col(m) = model.R_inv_sqrt * model.H.col(params[m]);
    }
    Eigen::MatrixXcd Lambda = Eigen::MatrixXcd::Zero(M, M);
    for (int m = 0; m < M; ++m) Lambda(m, m) = beta[m];
    FailureScenario sc = scenario_from_perturbation(B * Lambda * B.adjoint());
    sc.provenance = Provenance::param_change;
    sc.indices = params;
    sc.amplitudes = beta;
    sc.label = "param";
    for (int k : params) sc.label += " " + std::to_string(k + 1);
    return sc;
}

double beta_from_mu_alpha(double mu, double alpha) { return mu * mu + (1.0 + alpha) * (1.0 + alpha) - 1.0; }

Eigen::VectorXcd param_change_direction(const NetworkModel& model, int param) {
    if (param < 0 || param >= model.p) throw DomainError("parameter index out of range");
    Eigen::VectorXcd u = model.R_inv_sqrt * model.H.col(param);
    const double nrm = u.norm();
    if (nrm == 0.0) throw DomainError("parameter has no footprint on the network");
    return u / nrm;
}

NetworkSpec ring_lattice_spec(int N, int neighbors, std::uint64_t seed, double sigma2, double cov_lo, double cov_hi) {
    if (N < 3 || neighbors < 2 || neighbors % 2 != 0 || neighbors >= N) {
        throw ConfigError("ring lattice needs N >= 3 and an even neighbor count below N");
    }
    Rng rng(mix64(seed));
    std::uniform_real_distribution<double> cov(cov_lo, cov_hi);
    std::uniform_real_distribution<double> extra(0.5, 1.5);
    NetworkSpec spec;
    spec.sigma2 = sigma2;
    std::vector<double> incident(N, 0.0);
    for (int i = 0; i < N; ++i) {
        for (int d = 1; d <= neighbors / 2; ++d) {
            const int j = (i + d) % N;
            const double v = cov(rng);
            spec.edges.push_back({i + 1, j + 1, v});
            incident[i] += v;
            incident[j] += v;
        }
    }
    spec.variances.resize(N);
    for (int i = 0; i < N; ++i) spec.variances[i] = incident[i] + extra(rng);
    return spec;
}

}  // namespace spike
