#pragma once

#include <stdexcept>
#include <string>

namespace spike {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A mathematical precondition failed (point inside the support, spike below
/// the detectability edge, singular covariance, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A configuration or input document is malformed or inconsistent.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// File could not be read or written, or has the wrong layout.
class IoError : public Error {
public:
    using Error::Error;
};

/// Raised when a spike does not satisfy the separation condition. Carries the
/// bulk edge the corresponding sample eigenvalue collapses to.
class SpikeNotSeparated : public DomainError {
public:
    SpikeNotSeparated(double omega, double edge)
        : DomainError("spike not separated: omega=" + std::to_string(omega) +
                      " collapses to bulk edge " + std::to_string(edge)),
          omega_(omega), edge_(edge) {}

    double omega() const noexcept { return omega_; }
    double edge() const noexcept { return edge_; }

private:
    double omega_;
    double edge_;
};

}  // namespace spike
