#pragma once

#include <vector>

#include "spike/spectral_law.hpp"

namespace spike {

/// One distinct eigenvalue omega of the perturbation P with its multiplicity
/// and the 0-based position of its eigenvalue block among the sorted sample
/// eigenvalues (descending).
struct SpikeDescriptor {
    double omega = 0.0;
    int multiplicity = 1;
    int index_offset = 0;
};

/// Fills index_offset: positive spikes count down from the top of the
/// spectrum, negative spikes count up from the bottom (dimension N).
/// Input must be sorted by decreasing omega.
void assign_index_offsets(std::vector<SpikeDescriptor>& spikes, int N);

/// |omega| > guard * sqrt(c). Equality is not separated.
bool separation_check_mp(double omega, double c, double guard = 1.0);

/// Separation condition for a general law: omega > 0 needs
/// h(b+) + (1+omega)/omega < 0, omega < 0 needs h(a-) + (1+omega)/omega > 0.
/// With guard g > 1 the test is applied to omega / g.
bool separation_check(double omega, const SpectralLaw& law, double guard = 1.0);

/// rho = 1 + omega + c (1 + omega) / omega. Throws SpikeNotSeparated.
double rho_of_omega_mp(double omega, double c);

/// Unique root of h(rho) + (1 + omega)/omega = 0 outside [a, b].
double rho_of_omega_general(double omega, const SpectralLaw& law);

/// Inverse of rho_of_omega_mp: "+" branch above the bulk, "-" branch below.
/// Throws DomainError strictly inside (a, b).
double omega_hat_from_lambda(double lambda_hat, double c);

/// zeta = (1 - c/omega^2) / (1 + c/omega).
double zeta_mp(double omega, double c);

/// zeta = m(rho) (1 + h(rho)) / h'(rho).
double zeta_general(double rho, const SpectralLaw& law);

}  // namespace spike
