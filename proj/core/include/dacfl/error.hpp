#pragma once

#include <stdexcept>
#include <string>

namespace dacfl {

// Base for all library errors so callers can catch one type at the boundary.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid sizes or mismatched shapes in any operation.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Randomized doubly stochastic construction ran out of retries.
class ConstructionError : public Error {
public:
    ConstructionError(const std::string& msg, int attempts_)
        : Error(msg), attempts(attempts_) {}
    int attempts;
};

// Sinkhorn scaling failed to converge within max_iters.
class ScalingError : public Error {
public:
    ScalingError(const std::string& msg, double final_deviation_)
        : Error(msg), final_deviation(final_deviation_) {}
    double final_deviation;
};

// Requested sparsity cannot host a connected symmetric pattern.
class DensityError : public Error {
public:
    using Error::Error;
};

// Mixing matrix handed to a consensus or training step failed validation.
class TopologyError : public Error {
public:
    using Error::Error;
};

// IDX file parse failure; offset is the byte position that broke the parse.
class IdxParseError : public Error {
public:
    IdxParseError(const std::string& msg, std::size_t offset_)
        : Error(msg), offset(offset_) {}
    std::size_t offset;
};

// Bad or missing configuration (unknown key, unparsable value, missing file).
class ConfigError : public Error {
public:
    using Error::Error;
};

// NaN/Inf appeared in a training loss; round is the failing round index.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& msg, int round_)
        : Error(msg), round(round_) {}
    int round;
};

// Filesystem failures when writing results.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace dacfl
