#pragma once

#include <stdexcept>
#include <string>

namespace mofi {

// Base class for all toolkit errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input text (e.g. invalid JSON).
struct ParseError : Error {
    using Error::Error;
};

// Structurally valid input that is missing fields or has wrong shapes/types.
struct SchemaError : Error {
    using Error::Error;
};

// A domain-type invariant does not hold (non-unit quaternion, frame count < 2, ...).
struct InvariantError : Error {
    using Error::Error;
};

// Filesystem failure (missing file, unwritable destination).
struct IoError : Error {
    using Error::Error;
};

// Mismatched frame/joint/vector lengths between two inputs.
struct ShapeError : Error {
    using Error::Error;
};

// A per-frame computation is ill-posed (e.g. all joints coincide in a Procrustes fit).
struct DegenerateFrameError : Error {
    using Error::Error;
};

// Statistical input with no usable variation (constant vectors, zero variance).
struct DegenerateInputError : Error {
    using Error::Error;
};

// A pair references a motion id with no score.
struct MissingScoreError : Error {
    using Error::Error;
};

// Skeleton foot configuration unusable for a foot-based metric.
struct FootConfigError : Error {
    using Error::Error;
};

// Invalid run/training configuration.
struct ConfigError : Error {
    using Error::Error;
};

// Constrained projection left constraint violations after max_iterations.
struct NonConvergenceError : Error {
    using Error::Error;
};

}  // namespace mofi
