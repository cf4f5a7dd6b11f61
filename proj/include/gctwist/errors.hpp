#pragma once

#include <stdexcept>
#include <string>

namespace gctwist {

/// File could not be opened or read.
struct FileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input is structurally malformed (dangling ids, bad rational strings,
/// wrong JSON types). Distinct from a well-formed table that fails the
/// groupoid axioms.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A well-formed table violates the groupoid axioms.
struct AxiomError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An operation was called on inputs that fail its precondition
/// (e.g. quotient by a non-normal bundle). The message names the
/// failing condition and a witness where one exists.
struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Internal consistency check failed; indicates a bug, never bad input.
struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace gctwist
