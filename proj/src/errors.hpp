#pragma once

#include <stdexcept>
#include <string>

namespace epsteinlab {

// Base class for everything thrown by the library. The C wrapper maps each
// subclass to a status code, so new error kinds need a case there too.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid argument values: non-positive heights, bad descriptor fields,
// malformed grids.
struct BadArgument : Error {
    using Error::Error;
};

// Evaluation outside the declared domain of a holomorphic expression or a
// conformal density (log at 0, density outside its disk, point not in scene).
struct DomainError : Error {
    using Error::Error;
};

// Vanishing derivative where a finite Schwarzian or a pushforward needs f' != 0.
struct CriticalPointError : Error {
    using Error::Error;
};

// Degenerate immersion: the flowed surface fails to be an immersion at the
// requested time. Carries det(g) and, when recoverable from a nearby time,
// the eigenvalue of the infinity-side operator responsible (close to -1).
struct DegenerateError : Error {
    DegenerateError(const std::string& msg, double det_g_, double eig_)
        : Error(msg), det_g(det_g_), offending_eig(eig_) {}
    double det_g = 0.0;
    double offending_eig = 0.0;
};

// Time-gauge violations in the area/W-volume formulas (flow time below the
// embeddedness threshold, negative cylinder width, and similar).
struct GaugeError : Error {
    using Error::Error;
};

// Expression or JSON text that does not parse.
struct ParseError : Error {
    using Error::Error;
};

// Probe point sits on the bending locus: the supporting disk there is not one
// of the scene disks, so there is no hemisphere to test against.
struct ExcludedRegionError : Error {
    using Error::Error;
};

// Iterative searches that fail to settle (disk search, threshold bisection).
struct NonConvergedError : Error {
    using Error::Error;
};

// Operation that is well defined mathematically but outside what this
// implementation supports (e.g. intrinsic metric of a 3-disk union).
struct UnsupportedError : Error {
    using Error::Error;
};

} // namespace epsteinlab
