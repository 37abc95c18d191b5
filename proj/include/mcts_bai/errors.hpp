#pragma once

#include <stdexcept>
#include <string>

namespace mcts_bai {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed tree description (bad JSON shape, mean out of range, empty
/// children list, root not a max node, ...).
struct TreeError : Error {
    using Error::Error;
};

/// A computation that requires a leaf was handed an internal node.
struct NotALeafError : Error {
    using Error::Error;
};

/// Every per-leaf denominator of a complexity sum is zero, so the sum
/// diverges (e.g. a constant tree with epsilon = 0).
struct InfiniteComplexityError : Error {
    using Error::Error;
};

/// Parameters fall outside the regime a formula is stated for
/// (delta too large for the confidence level, log-log argument below e, ...).
struct InvalidRegimeError : Error {
    using Error::Error;
};

/// The simplified log-log inversion constant would be negative here.
struct DegenerateRegimeError : Error {
    using Error::Error;
};

/// The depth-two lower-bound solver needs a root whose children are all
/// min nodes over leaves.
struct NotDepthTwoError : Error {
    using Error::Error;
};

/// The depth-two instance has ties that make the canonical ordering of
/// actions ambiguous, so the sparse-support reduction does not apply.
struct OrderingViolatedError : Error {
    using Error::Error;
};

/// kl_div called with a boundary second argument it is not defined for.
struct DomainError : Error {
    using Error::Error;
};

}  // namespace mcts_bai
