#pragma once

#include <stdexcept>
#include <string>

namespace dcmrank {

//! Rejected model or algorithm parameter (bad tail index, negative rate, ...).
class InvalidParameter : public std::invalid_argument {
public:
    explicit InvalidParameter(const std::string& what) : std::invalid_argument(what) {}
};

//! A degree sequence that cannot be wired into a graph (stub imbalance).
class InvalidSequence : public std::invalid_argument {
public:
    explicit InvalidSequence(const std::string& what) : std::invalid_argument(what) {}
};

//! max |C_i| D_i exceeds the damping bound, so geometric convergence is not certified.
class CertificationError : public std::runtime_error {
public:
    explicit CertificationError(const std::string& what) : std::runtime_error(what) {}
};

//! A branching-process replication grew past its node budget.
class PopulationCapExceeded : public std::runtime_error {
public:
    explicit PopulationCapExceeded(const std::string& what) : std::runtime_error(what) {}
};

//! More replications failed than the run tolerates.
class FailureBudgetExceeded : public std::runtime_error {
public:
    explicit FailureBudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

} // namespace dcmrank
