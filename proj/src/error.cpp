#include "wfctl/error.hpp"

namespace wfctl {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::StructuralMismatch: return "structural-mismatch";
        case ErrorKind::NotEnabled: return "not-enabled";
        case ErrorKind::FusionConflict: return "fusion-conflict";
        case ErrorKind::InvalidSpec: return "invalid-spec";
        case ErrorKind::CapacityExceeded: return "capacity-exceeded";
        case ErrorKind::UnboundedNet: return "unbounded-net";
        case ErrorKind::NoSupervisor: return "no-supervisor-exists";
        case ErrorKind::SchedulingDeadlock: return "scheduling-deadlock";
        case ErrorKind::IncompleteWeights: return "incomplete-weights";
        case ErrorKind::EmptyInput: return "empty-input";
        case ErrorKind::FeasibilityViolation: return "feasibility-violation";
        case ErrorKind::Config: return "config";
        case ErrorKind::DuplicateTemplate: return "duplicate-template";
        case ErrorKind::NotFound: return "not-found";
        case ErrorKind::EmptyInstantiation: return "empty-instantiation";
        case ErrorKind::Parse: return "parse";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

}  // namespace wfctl
