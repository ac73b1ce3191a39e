#pragma once

#include <stdexcept>
#include <string>

namespace gmpforge {

// Base class for every error the library raises.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid graph construction or a trace that does not walk the graph's edges.
struct CfgError : Error {
    using Error::Error;
};

// Caller-side contract violation, e.g. invoking a component with the wrong
// arity or value kinds.
struct ContractError : Error {
    using Error::Error;
};

// Malformed serialized text (micro-programs or graphs).
struct ParseError : Error {
    using Error::Error;
};

// Invalid run configuration: bad rates, unknown object names, bad flags.
struct ConfigError : Error {
    using Error::Error;
};

// Missing or corrupt on-disk run artifacts.
struct ArtifactError : Error {
    using Error::Error;
};

} // namespace gmpforge
