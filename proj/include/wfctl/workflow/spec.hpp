#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace wfctl::workflow {

// Resource type -> units demanded.
using Demand = std::map<std::string, int>;

struct Job {
    std::string id;
    std::string activity;
    int duration = 1;
    Demand demand;
    bool operator==(const Job&) const = default;
};

// `before` must end before `after` starts.
struct Precedence {
    std::string before;
    std::string after;
    bool operator==(const Precedence&) const = default;
};

// The two jobs run in either order but never at the same time.
struct NonOverlap {
    std::string first;
    std::string second;
    bool operator==(const NonOverlap&) const = default;
};

using Constraint = std::variant<Precedence, NonOverlap>;

struct WorkflowSpec {
    std::string activity;
    std::vector<Job> jobs;
    std::vector<Constraint> constraints;

    const Job* find_job(std::string_view id) const;
    bool operator==(const WorkflowSpec&) const = default;
};

struct ResourcePool {
    std::map<std::string, int> capacity;
    bool operator==(const ResourcePool&) const = default;
};

// Activity id -> number of instances to process.
using InstanceCounts = std::map<std::string, int>;

enum class DiagnosticKind {
    UnknownResource,
    CyclicPrecedence,
    UnknownJob,
    DemandExceedsCapacity,
    DuplicateJob,
    DuplicateConstraint,
    InvalidDuration,
    EmptyDemand,
    InvalidCapacity,
    InvalidName,
};

std::string_view to_string(DiagnosticKind kind);

struct Diagnostic {
    DiagnosticKind kind;
    std::string message;
    bool operator==(const Diagnostic&) const = default;
};

// Checks that need no pool: names, durations, demands, constraint endpoints,
// duplicates and precedence cycles.
std::vector<Diagnostic> validate_structure(const WorkflowSpec& spec);
// validate_structure plus resource checks against the pool.
std::vector<Diagnostic> validate_spec(const WorkflowSpec& spec, const ResourcePool& pool);
std::vector<Diagnostic> validate_pool(const ResourcePool& pool);

std::string format_diagnostics(const std::vector<Diagnostic>& diagnostics);

// Per-job facts needed by the timed analysis, keyed by job id.
struct JobInfo {
    std::string activity;
    int duration = 1;
    Demand demand;
};
using JobTable = std::map<std::string, JobInfo>;

JobTable job_table(std::span<const WorkflowSpec> specs);

}  // namespace wfctl::workflow
