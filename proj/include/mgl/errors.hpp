#pragma once

#include <stdexcept>
#include <string>

namespace mgl {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Stencil would touch the two-cell boundary margin of a grid.
class IndexOutOfInterior : public Error {
public:
    using Error::Error;
};

/// Point outside the declared domain of an analytic source, or a grid
/// source queried away from a node.
class DomainError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// First fundamental form fails EG - F^2 > 0.
class DegenerateImmersion : public Error {
public:
    using Error::Error;
};

/// Shear parameter b must be positive.
class InvalidShear : public Error {
public:
    using Error::Error;
};

/// Chart violates E = G, F = 0 beyond tolerance.
class NotIsothermal : public Error {
public:
    using Error::Error;
};

/// Component Laplacians exceed tolerance.
class NotHarmonic : public Error {
public:
    using Error::Error;
};

/// The two algebraic expressions for omega disagree; signals a
/// non-minimal input fed into machinery that assumes minimality.
class Identity39Violation : public Error {
public:
    using Error::Error;
};

class DenominatorVanishes : public Error {
public:
    using Error::Error;
};

/// Input graph fails the minimal surface equation beyond tolerance.
class NotMinimal : public Error {
public:
    using Error::Error;
};

/// Grid file is syntactically invalid; carries the offending line.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class UnknownSurface : public Error {
public:
    using Error::Error;
};

/// File cannot be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace mgl
