#include "wfctl/workflow/spec.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>

#include "common/text.hpp"
#include "wfctl/error.hpp"

namespace wfctl::workflow {

const Job* WorkflowSpec::find_job(std::string_view id) const {
    const auto it = std::find_if(jobs.begin(), jobs.end(), [&](const Job& j) { return j.id == id; });
    return it == jobs.end() ? nullptr : &*it;
}

std::string_view to_string(DiagnosticKind kind) {
    switch (kind) {
        case DiagnosticKind::UnknownResource: return "unknown-resource";
        case DiagnosticKind::CyclicPrecedence: return "cyclic-precedence";
        case DiagnosticKind::UnknownJob: return "unknown-job";
        case DiagnosticKind::DemandExceedsCapacity: return "demand-exceeds-capacity";
        case DiagnosticKind::DuplicateJob: return "duplicate-job";
        case DiagnosticKind::DuplicateConstraint: return "duplicate-constraint";
        case DiagnosticKind::InvalidDuration: return "invalid-duration";
        case DiagnosticKind::EmptyDemand: return "empty-demand";
        case DiagnosticKind::InvalidCapacity: return "invalid-capacity";
        case DiagnosticKind::InvalidName: return "invalid-name";
    }
    return "unknown";
}

namespace {

bool has_cycle(const WorkflowSpec& spec) {
    std::map<std::string, std::vector<std::string>> successors;
    std::map<std::string, int> indegree;
    for (const auto& job : spec.jobs) indegree.emplace(job.id, 0);
    for (const auto& c : spec.constraints) {
        const auto* p = std::get_if<Precedence>(&c);
        if (!p || !indegree.contains(p->before) || !indegree.contains(p->after)) continue;
        successors[p->before].push_back(p->after);
        ++indegree[p->after];
    }
    std::vector<std::string> ready;
    for (const auto& [id, d] : indegree) {
        if (d == 0) ready.push_back(id);
    }
    std::size_t visited = 0;
    while (!ready.empty()) {
        const std::string id = ready.back();
        ready.pop_back();
        ++visited;
        for (const auto& next : successors[id]) {
            if (--indegree[next] == 0) ready.push_back(next);
        }
    }
    return visited != indegree.size();
}

}  // namespace

std::vector<Diagnostic> validate_structure(const WorkflowSpec& spec) {
    std::vector<Diagnostic> out;
    const auto add = [&](DiagnosticKind kind, std::string message) { out.push_back({kind, std::move(message)}); };

    if (!text::is_word(spec.activity)) add(DiagnosticKind::InvalidName, fmt::format("invalid activity id '{}'", spec.activity));
    std::set<std::string> ids;
    for (const auto& job : spec.jobs) {
        if (!text::is_word(job.id)) add(DiagnosticKind::InvalidName, fmt::format("invalid job id '{}'", job.id));
        if (!ids.insert(job.id).second) add(DiagnosticKind::DuplicateJob, fmt::format("job {} declared twice", job.id));
        if (job.duration < 1) {
            add(DiagnosticKind::InvalidDuration, fmt::format("job {} has duration {} (< 1)", job.id, job.duration));
        }
        if (job.demand.empty()) add(DiagnosticKind::EmptyDemand, fmt::format("job {} demands no resource", job.id));
        for (const auto& [res, units] : job.demand) {
            if (!text::is_word(res)) add(DiagnosticKind::InvalidName, fmt::format("invalid resource id '{}'", res));
            if (units < 1) {
                add(DiagnosticKind::EmptyDemand, fmt::format("job {} demands {} units of {}", job.id, units, res));
            }
        }
    }

    std::set<std::tuple<int, std::string, std::string>> seen;
    for (const auto& c : spec.constraints) {
        const bool precedence = std::holds_alternative<Precedence>(c);
        std::string a = precedence ? std::get<Precedence>(c).before : std::get<NonOverlap>(c).first;
        std::string b = precedence ? std::get<Precedence>(c).after : std::get<NonOverlap>(c).second;
        const char* what = precedence ? "before" : "exclusive";
        for (const auto* end : {&a, &b}) {
            if (!ids.contains(*end)) {
                add(DiagnosticKind::UnknownJob, fmt::format("constraint '{} {} {}' names unknown job {}", what, a, b, *end));
            }
        }
        if (a == b) {
            add(DiagnosticKind::CyclicPrecedence, fmt::format("constraint '{} {} {}' relates a job to itself", what, a, b));
        }
        if (!precedence && b < a) std::swap(a, b);
        if (!seen.emplace(precedence ? 0 : 1, a, b).second) {
            add(DiagnosticKind::DuplicateConstraint, fmt::format("constraint '{} {} {}' repeated", what, a, b));
        }
    }
    if (has_cycle(spec)) {
        add(DiagnosticKind::CyclicPrecedence, fmt::format("precedence constraints of {} contain a cycle", spec.activity));
    }
    return out;
}

std::vector<Diagnostic> validate_pool(const ResourcePool& pool) {
    std::vector<Diagnostic> out;
    for (const auto& [res, cap] : pool.capacity) {
        if (!text::is_word(res)) out.push_back({DiagnosticKind::InvalidName, fmt::format("invalid resource id '{}'", res)});
        if (cap < 1) {
            out.push_back({DiagnosticKind::InvalidCapacity, fmt::format("resource {} has capacity {} (< 1)", res, cap)});
        }
    }
    return out;
}

std::vector<Diagnostic> validate_spec(const WorkflowSpec& spec, const ResourcePool& pool) {
    auto out = validate_structure(spec);
    auto pool_diags = validate_pool(pool);
    out.insert(out.end(), pool_diags.begin(), pool_diags.end());
    for (const auto& job : spec.jobs) {
        for (const auto& [res, units] : job.demand) {
            const auto it = pool.capacity.find(res);
            if (it == pool.capacity.end()) {
                out.push_back({DiagnosticKind::UnknownResource, fmt::format("job {} uses unknown resource {}", job.id, res)});
            } else if (units > it->second) {
                out.push_back({DiagnosticKind::DemandExceedsCapacity,
                               fmt::format("job {} demands {} x {} but capacity is {}", job.id, units, res, it->second)});
            }
        }
    }
    return out;
}

std::string format_diagnostics(const std::vector<Diagnostic>& diagnostics) {
    std::string out;
    for (const auto& d : diagnostics) out += fmt::format("{}: {}\n", to_string(d.kind), d.message);
    return out;
}

JobTable job_table(std::span<const WorkflowSpec> specs) {
    JobTable table;
    for (const auto& spec : specs) {
        for (const auto& job : spec.jobs) {
            if (!table.emplace(job.id, JobInfo{spec.activity, job.duration, job.demand}).second) {
                throw Error(ErrorKind::InvalidSpec, "job id " + job.id + " appears in more than one activity");
            }
        }
    }
    return table;
}

}  // namespace wfctl::workflow
