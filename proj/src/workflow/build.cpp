#include "wfctl/workflow/build.hpp"

#include <set>

#include <fmt/format.h>

#include "wfctl/error.hpp"

namespace wfctl::workflow {

using pn::Count;
using pn::PetriNet;

std::string pending_place(std::string_view job) { return fmt::format("pending_{}", job); }
std::string exec_place(std::string_view job) { return fmt::format("exec_{}", job); }
std::string wait_place(std::string_view before, std::string_view after) { return fmt::format("wait_{}_{}", before, after); }
std::string mutex_place(std::string_view first, std::string_view second) {
    return fmt::format("mutex_{}_{}", first, second);
}
std::string done_place(std::string_view activity) { return fmt::format("done_{}", activity); }
std::string start_transition(std::string_view job) { return fmt::format("start_{}", job); }
std::string end_transition(std::string_view job) { return fmt::format("end_{}", job); }

namespace {

std::string_view strip(std::string_view label, std::string_view prefix) {
    return label.starts_with(prefix) ? label.substr(prefix.size()) : std::string_view{};
}

void refuse(const std::string& what, const std::vector<Diagnostic>& diagnostics) {
    if (!diagnostics.empty()) throw Error(ErrorKind::InvalidSpec, what + ":\n" + format_diagnostics(diagnostics));
}

// Builder keeping ids and labels identical.
struct NetBuilder {
    std::vector<pn::Place> places;
    std::vector<pn::Transition> transitions;
    std::vector<pn::InputArc> inputs;
    std::vector<pn::OutputArc> outputs;

    void place(const std::string& name, Count tokens = 0) { places.push_back({name, name, tokens}); }
    void transition(const std::string& name) { transitions.push_back({name, name}); }
    void consume(const std::string& p, const std::string& t, Count w = 1) { inputs.push_back({p, t, w}); }
    void produce(const std::string& t, const std::string& p, Count w = 1) { outputs.push_back({t, p, w}); }
    PetriNet build() { return PetriNet(std::move(places), std::move(transitions), std::move(inputs), std::move(outputs)); }
};

}  // namespace

std::string_view job_of_start(std::string_view label) { return strip(label, "start_"); }
std::string_view job_of_end(std::string_view label) { return strip(label, "end_"); }

PetriNet activity_to_net(const WorkflowSpec& spec) {
    refuse("activity " + spec.activity + " is invalid", validate_structure(spec));

    NetBuilder b;
    std::set<std::string> resources;
    std::set<std::string> has_successor;
    for (const auto& c : spec.constraints) {
        if (const auto* p = std::get_if<Precedence>(&c)) has_successor.insert(p->before);
    }

    b.place(done_place(spec.activity));
    for (const auto& job : spec.jobs) {
        const auto start = start_transition(job.id);
        const auto end = end_transition(job.id);
        b.place(pending_place(job.id));
        b.place(exec_place(job.id));
        b.transition(start);
        b.transition(end);
        b.consume(pending_place(job.id), start);
        b.produce(start, exec_place(job.id));
        b.consume(exec_place(job.id), end);
        for (const auto& [res, units] : job.demand) {
            resources.insert(res);
            b.consume(res, start, units);
            b.produce(end, res, units);
        }
        if (!has_successor.contains(job.id)) b.produce(end, done_place(spec.activity));
    }
    for (const auto& res : resources) b.place(res);

    for (const auto& c : spec.constraints) {
        if (const auto* p = std::get_if<Precedence>(&c)) {
            const auto wait = wait_place(p->before, p->after);
            b.place(wait);
            b.produce(end_transition(p->before), wait);
            b.consume(wait, start_transition(p->after));
        } else {
            const auto& n = std::get<NonOverlap>(c);
            const auto mutex = mutex_place(n.first, n.second);
            b.place(mutex, 1);
            for (const auto* job : {&n.first, &n.second}) {
                b.consume(mutex, start_transition(*job));
                b.produce(end_transition(*job), mutex);
            }
        }
    }
    return b.build();
}

PetriNet compose_global(std::span<const WorkflowSpec> specs, const ResourcePool& pool, const InstanceCounts& counts) {
    std::set<std::string> activities;
    for (const auto& spec : specs) {
        refuse("activity " + spec.activity + " is invalid", validate_spec(spec, pool));
        if (!activities.insert(spec.activity).second) {
            throw Error(ErrorKind::InvalidSpec, "activity " + spec.activity + " composed twice");
        }
        const auto it = counts.find(spec.activity);
        if (it == counts.end()) throw Error(ErrorKind::Config, "no instance count for activity " + spec.activity);
        if (it->second < 0) throw Error(ErrorKind::Config, "negative instance count for activity " + spec.activity);
    }
    refuse("resource pool is invalid", validate_pool(pool));
    for (const auto& [activity, n] : counts) {
        if (!activities.contains(activity)) throw Error(ErrorKind::Config, "instance count for unknown activity " + activity);
    }
    job_table(specs);  // rejects job ids shared between activities

    std::vector<PetriNet> operands;
    {
        NetBuilder resources;
        for (const auto& [res, cap] : pool.capacity) resources.place(res);
        operands.push_back(resources.build());
    }
    for (const auto& spec : specs) operands.push_back(activity_to_net(spec));
    const PetriNet fused = pn::fuse_compose(operands);

    const pn::Marking structural = fused.initial_marking();
    std::vector<Count> marking(structural.counts().begin(), structural.counts().end());
    for (const auto& [res, cap] : pool.capacity) marking[*fused.find_place_by_label(res)] = cap;
    for (const auto& spec : specs) {
        for (const auto& job : spec.jobs) {
            marking[*fused.find_place_by_label(pending_place(job.id))] = counts.at(spec.activity);
        }
    }
    return fused.with_initial_marking(pn::Marking(std::move(marking)));
}

MarkingPredicate completion_predicate(const PetriNet& net) {
    std::vector<std::size_t> watched;
    for (std::size_t i = 0; i < net.place_count(); ++i) {
        const auto& label = net.places()[i].label;
        if (label.starts_with("pending_") || label.starts_with("exec_") || label.starts_with("wait_")) {
            watched.push_back(i);
        }
    }
    return [watched = std::move(watched)](const pn::Marking& m) {
        for (const auto i : watched) {
            if (m[i] != 0) return false;
        }
        return true;
    };
}

std::vector<std::string> resource_invariant_violations(const PetriNet& net, const JobTable& jobs,
                                                       const ResourcePool& pool, const pn::Marking& m) {
    std::vector<std::string> out;
    for (const auto& [res, cap] : pool.capacity) {
        const auto place = net.find_place_by_label(res);
        if (!place) {
            out.push_back(fmt::format("{}: no place", res));
            continue;
        }
        long long total = m[*place];
        for (const auto& [job, info] : jobs) {
            const auto demand = info.demand.find(res);
            if (demand == info.demand.end()) continue;
            if (const auto exec = net.find_place_by_label(exec_place(job))) total += 1LL * demand->second * m[*exec];
        }
        if (total != cap) out.push_back(fmt::format("{}: {} != capacity {}", res, total, cap));
    }
    return out;
}

}  // namespace wfctl::workflow
