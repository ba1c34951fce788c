#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spike/spike_algebra.hpp"

namespace spike {

/// Sensor network description: node variances E|y(i)|^2, covariances on the
/// listed links, noise variance. Unlisted pairs have zero covariance.
struct NetworkSpec {
    struct Edge {
        int i = 0;  // 1-based node ids
        int j = 0;
        double cov = 0.0;
    };
    double sigma2 = 0.01;  // linear scale
    std::vector<double> variances;  // index = node id - 1
    std::vector<Edge> edges;
};

/// JSON document with {"sigma2_db": x} or {"sigma2": x}, "nodes": [{"id",
/// "variance"}], "edges": [{"i", "j", "cov"}]. Throws ConfigError / IoError.
NetworkSpec parse_network_spec(const std::string& text);
NetworkSpec load_network_spec(const std::filesystem::path& path);
std::string network_spec_to_json(const NetworkSpec& spec);

double db_to_linear(double db);

/// y = H theta + sigma w with R = H H* + sigma^2 I.
struct NetworkModel {
    int N = 0;
    int p = 0;
    Eigen::MatrixXcd H;
    double sigma2 = 0.0;
    Eigen::MatrixXcd R;
    Eigen::MatrixXcd R_inv_sqrt;
    std::vector<std::string> warnings;

    Eigen::MatrixXcd gram() const { return H * H.adjoint(); }
};

/// R from the spec, H the PSD square root of R - sigma^2 I. Throws
/// DomainError("spec not PSD") when R - sigma^2 I has an eigenvalue below
/// -1e-8 ||R||; smaller negative eigenvalues are clipped with a warning.
NetworkModel network_from_spec(const NetworkSpec& spec);

/// Model from an explicit channel matrix.
NetworkModel network_from_channel(const Eigen::MatrixXcd& H, double sigma2);

/// One distinct eigenvalue of P with an orthonormal basis of its eigenspace.
struct ScenarioSpike {
    double omega = 0.0;
    Eigen::MatrixXcd basis;  // N x multiplicity

    int multiplicity() const { return static_cast<int>(basis.cols()); }
};

enum class Provenance { node_failure, param_change, explicit_perturbation };

std::string to_string(Provenance p);

/// Hypothesis H_k: P_k = sum_i omega_i U_i U_i*, spikes sorted by decreasing omega.
struct FailureScenario {
    int id = 0;
    std::string label;
    std::vector<ScenarioSpike> spikes;
    Provenance provenance = Provenance::explicit_perturbation;
    std::vector<int> indices;        // failing nodes or changed parameters, 0-based
    std::vector<double> amplitudes;  // sigma_k or beta_k

    int dimension() const;
    int rank() const;
    bool empty() const { return spikes.empty(); }
    Eigen::MatrixXcd perturbation(int N) const;
    /// Descriptors with index offsets assigned for an N-dimensional spectrum.
    std::vector<SpikeDescriptor> descriptors(int N) const;
    /// Largest positive and most negative omega, if any.
    std::optional<double> largest_positive() const;
    std::optional<double> most_negative() const;
};

/// Eigendecomposes a Hermitian perturbation, drops |omega| <= 1e-10 ||P||,
/// groups eigenvalues equal to `group_tol` relative into one spike.
/// Throws DomainError when some omega <= -1.
FailureScenario scenario_from_perturbation(const Eigen::MatrixXcd& P, double group_tol = 1e-8);

/// Rank-one or higher explicit hypothesis from omegas and bases.
FailureScenario explicit_scenario(std::vector<ScenarioSpike> spikes);

/// Default failure amplitude sigma_k^2 = sum_i (H H*)_{ki}.
double default_failure_variance(const NetworkModel& model, int node);

/// Simultaneous failure of `nodes` (0-based). sigma_fail holds standard
/// deviations sigma_k; empty means the default amplitude for each node.
FailureScenario node_failure_scenario(const NetworkModel& model, const std::vector<int>& nodes,
                                      std::vector<double> sigma_fail = {});

/// Change of parameters `params` (0-based columns of H) with amplitudes beta.
FailureScenario param_change_scenario(const NetworkModel& model, const std::vector<int>& params,
                                      const std::vector<double>& beta);

/// beta = mu^2 + (1 + alpha)^2 - 1.
double beta_from_mu_alpha(double mu, double alpha);

/// Unit vector R^{-1/2} H e_k spanning the parameter-change eigenspace.
Eigen::VectorXcd param_change_direction(const NetworkModel& model, int param);

/// Ring lattice of N nodes, each linked to `neighbors` nearest nodes (half on
/// each side), link covariances uniform in [cov_lo, cov_hi], node variance
/// equal to the sum of incident covariances plus uniform [0.5, 1.5].
NetworkSpec ring_lattice_spec(int N, int neighbors, std::uint64_t seed, double sigma2 = 0.01,
                              double cov_lo = 0.77, double cov_hi = 0.99);

}  // namespace spike
