#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wfctl {

enum class ErrorKind {
    StructuralMismatch,
    NotEnabled,
    FusionConflict,
    InvalidSpec,
    CapacityExceeded,
    UnboundedNet,
    NoSupervisor,
    SchedulingDeadlock,
    IncompleteWeights,
    EmptyInput,
    FeasibilityViolation,
    Config,
    DuplicateTemplate,
    NotFound,
    EmptyInstantiation,
    Parse,
    Io,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers switch on kind().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::int64_t detail = 0)
        : std::runtime_error(message), kind_(kind), detail_(detail) {}

    ErrorKind kind() const noexcept { return kind_; }
    // Kind-specific number: partial node count for CapacityExceeded,
    // line number for Parse, 0 otherwise.
    std::int64_t detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::int64_t detail_;
};

}  // namespace wfctl
