// Exception types shared by all solvers.

#pragma once

#include <stdexcept>
#include <cstdint>
#include <string>

namespace dickesq {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidParams : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

// |<J>| too small for the squeezing parameter to be defined.
struct BlochVectorVanishes : Error {
    using Error::Error;
};

// The collective solver only handles gamma_s = 0.
struct NonCollectiveParams : Error {
    using Error::Error;
};

struct NonConvergence : Error {
    NonConvergence(const std::string& what, double residual_)
        : Error(what), residual(residual_) {}
    double residual;
};

struct StepUnderflow : Error {
    StepUnderflow(const std::string& what, double t_)
        : Error(what), t(t_) {}
    double t;
};

struct RootBracketFailure : Error {
    using Error::Error;
};

struct NoStableFixedPoint : Error {
    using Error::Error;
};

struct ZeroJumpRate : Error {
    using Error::Error;
};

// Cumulant state left its physical bounds (closure breakdown).
struct InvariantBreach : Error {
    InvariantBreach(const std::string& what, double t_)
        : Error(what), t(t_) {}
    double t;
};

struct TrajectoryFailure : Error {
    TrajectoryFailure(const std::string& what, std::uint64_t index_, std::uint64_t seed_)
        : Error(what), index(index_), seed(seed_) {}
    std::uint64_t index;
    std::uint64_t seed;
};

} // namespace dickesq
