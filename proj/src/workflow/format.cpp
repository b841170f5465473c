#include "wfctl/workflow/format.hpp"

#include <fmt/format.h>

#include "common/text.hpp"
#include "wfctl/error.hpp"

namespace wfctl::workflow {

namespace {

// "<res>" or "<res>*<k>"
std::pair<std::string, int> parse_use(const text::Line& line, std::string_view word) {
    const auto star = word.find('*');
    if (star == std::string_view::npos) return {std::string(word), 1};
    const auto units = text::to_int<int>(word.substr(star + 1));
    if (star == 0 || !units || *units < 1) text::fail(line.number, "bad resource use '" + std::string(word) + "'");
    return {std::string(word.substr(0, star)), *units};
}

}  // namespace

std::vector<WorkflowSpec> parse_workflows(std::string_view source) {
    std::vector<WorkflowSpec> specs;
    for (const auto& line : text::tokenize(source)) {
        const auto kind = line.words[0];
        if (kind == "workflow") {
            text::expect_arity(line, 2);
            specs.push_back({std::string(line.words[1]), {}, {}});
            continue;
        }
        if (specs.empty()) text::fail(line.number, "'" + std::string(kind) + "' before any 'workflow' directive");
        WorkflowSpec& spec = specs.back();
        if (kind == "job") {
            if (line.words.size() < 6 || line.words[2] != "duration" || line.words[4] != "uses") {
                text::fail(line.number, "expected 'job <id> duration <n> uses <res> ...'");
            }
            Job job{std::string(line.words[1]), spec.activity, text::expect_int<int>(line, 3, "duration"), {}};
            for (std::size_t i = 5; i < line.words.size(); ++i) {
                const auto [res, units] = parse_use(line, line.words[i]);
                job.demand[res] += units;
            }
            spec.jobs.push_back(std::move(job));
        } else if (kind == "before") {
            text::expect_arity(line, 3);
            spec.constraints.emplace_back(Precedence{std::string(line.words[1]), std::string(line.words[2])});
        } else if (kind == "exclusive") {
            text::expect_arity(line, 3);
            spec.constraints.emplace_back(NonOverlap{std::string(line.words[1]), std::string(line.words[2])});
        } else {
            text::fail(line.number, "unknown directive '" + std::string(kind) + "'");
        }
    }
    return specs;
}

ResourcePool parse_pool(std::string_view source) {
    ResourcePool pool;
    for (const auto& line : text::tokenize(source)) {
        if (line.words[0] != "resource") text::fail(line.number, "unknown directive '" + std::string(line.words[0]) + "'");
        text::expect_arity(line, 4);
        if (line.words[2] != "capacity") text::fail(line.number, "expected 'resource <id> capacity <n>'");
        const int cap = text::expect_int<int>(line, 3, "capacity");
        if (cap < 1) text::fail(line.number, "capacity must be >= 1");
        if (!pool.capacity.emplace(std::string(line.words[1]), cap).second) {
            text::fail(line.number, "resource " + std::string(line.words[1]) + " declared twice");
        }
    }
    return pool;
}

InstanceCounts parse_instances(std::string_view source) {
    InstanceCounts counts;
    for (const auto& line : text::tokenize(source)) {
        if (line.words[0] != "instances") text::fail(line.number, "unknown directive '" + std::string(line.words[0]) + "'");
        text::expect_arity(line, 3);
        const int n = text::expect_int<int>(line, 2, "count");
        if (n < 0) text::fail(line.number, "instance count must be >= 0");
        if (!counts.emplace(std::string(line.words[1]), n).second) {
            text::fail(line.number, "activity " + std::string(line.words[1]) + " listed twice");
        }
    }
    return counts;
}

std::string serialize(const WorkflowSpec& spec) {
    std::string out = fmt::format("workflow {}\n", spec.activity);
    for (const auto& job : spec.jobs) {
        out += fmt::format("job {} duration {} uses", job.id, job.duration);
        for (const auto& [res, units] : job.demand) {
            out += units == 1 ? fmt::format(" {}", res) : fmt::format(" {}*{}", res, units);
        }
        out += '\n';
    }
    for (const auto& c : spec.constraints) {
        if (const auto* p = std::get_if<Precedence>(&c)) {
            out += fmt::format("before {} {}\n", p->before, p->after);
        } else {
            const auto& n = std::get<NonOverlap>(c);
            out += fmt::format("exclusive {} {}\n", n.first, n.second);
        }
    }
    return out;
}

std::string serialize(const ResourcePool& pool) {
    std::string out;
    for (const auto& [res, cap] : pool.capacity) out += fmt::format("resource {} capacity {}\n", res, cap);
    return out;
}

std::string serialize(const InstanceCounts& counts) {
    std::string out;
    for (const auto& [activity, n] : counts) out += fmt::format("instances {} {}\n", activity, n);
    return out;
}

}  // namespace wfctl::workflow
