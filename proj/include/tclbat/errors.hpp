#pragma once

#include <stdexcept>
#include <string>

namespace tclbat {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Non-finite temperature produced by an integration step (bad parameters or dt).
struct ModelDivergenceError : Error {
    using Error::Error;
};

/// Requested electrical power outside [0, P_m].
struct PowerBoundError : Error {
    using Error::Error;
};

/// Dead-band cycle is not well posed (non-positive log argument).
struct InfeasibleCycleError : Error {
    using Error::Error;
};

/// Nominal power falls outside (0, P_m): the unit cannot hold its set-point.
struct SetpointError : Error {
    using Error::Error;
};

/// A heterogeneity spec produced a unit violating the parameter invariants.
struct SpecInfeasibleError : Error {
    using Error::Error;
};

/// A controller commanded a locked or band-violating switch.
struct ContractViolationError : Error {
    using Error::Error;
};

/// A unit has no power flexibility (P_m == P_o), so no allocation exists.
struct ZeroFlexibilityError : Error {
    using Error::Error;
};

/// A closed-form path was requested for a fleet outside its hypothesis;
/// callers should fall back to the numeric path.
struct WrongHeterogeneityError : Error {
    using Error::Error;
};

/// Malformed scenario / signal file or inconsistent configuration.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace tclbat
