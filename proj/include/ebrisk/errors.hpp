#pragma once

#include <stdexcept>

namespace ebrisk {

// Base type for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Prior construction or parsing rejected the input.
struct InvalidPrior : Error { using Error::Error; };

// Noise standard deviation outside (0, inf).
struct InvalidSigma : Error { using Error::Error; };

// Quadrature, grid, or tail parameters outside their contracts.
struct InvalidSpec : Error { using Error::Error; };

// An operation requiring mean-zero priors received a non-centered one.
struct NonCenteredPrior : Error { using Error::Error; };

// Negative input where only nonnegative values are defined.
struct NegativeInput : Error { using Error::Error; };

// s^k * tail(s) keeps growing along the search grid: no finite constant.
struct NonIntegrableTail : Error { using Error::Error; };

// Prior collapsed to a single atom where spread is required.
struct DegeneratePrior : Error { using Error::Error; };

// Search configuration admits no feasible candidate.
struct InfeasibleConfig : Error { using Error::Error; };

}  // namespace ebrisk
