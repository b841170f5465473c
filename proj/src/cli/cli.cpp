#include "wfctl/cli/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "CLI11.hpp"
#include "cli/inputs.hpp"
#include "common/text.hpp"
#include "wfctl/agents/agents.hpp"
#include "wfctl/analysis/predicate.hpp"
#include "wfctl/analysis/reachability.hpp"
#include "wfctl/analysis/schedule.hpp"
#include "wfctl/analysis/supervisor.hpp"
#include "wfctl/error.hpp"
#include "wfctl/kb/kb.hpp"
#include "wfctl/workflow/build.hpp"
#include "wfctl/workflow/format.hpp"

namespace wfctl::cli {

namespace {

struct Options {
    std::vector<std::string> inputs;
    std::string pool, instances, weights, scenario, forbidden, kb, out;
    std::size_t node_cap = 1'000'000;
    std::string model;
};

// A failed command: message for stderr and exit code.
struct Failed {
    int code;
    std::string message;
};

enum Flag : unsigned {
    Pool = 1,
    Instances = 2,
    WeightsFlag = 4,
    ScenarioFlag = 8,
    Forbidden = 16,
    NodeCap = 32,
    Kb = 64,
};

void add_flags(CLI::App* sub, Options& o, unsigned flags) {
    if (flags & Pool) sub->add_option("--pool", o.pool, "resource pool file");
    if (flags & Instances) sub->add_option("--instances", o.instances, "instance count file (default: 1 each)");
    if (flags & WeightsFlag) sub->add_option("--weights", o.weights, "activity weights file (default: 1 each)");
    if (flags & ScenarioFlag) sub->add_option("--scenario", o.scenario, "budgets, prices and breakdowns");
    if (flags & Forbidden) sub->add_option("--forbidden", o.forbidden, "forbidden-state expression file");
    if (flags & NodeCap) {
        sub->add_option("--node-cap", o.node_cap, "maximum reachable markings explored")->default_val(1'000'000);
    }
    if (flags & Kb) sub->add_option("--kb", o.kb, "knowledge base directory")->required();
    sub->add_option("--out", o.out, "write the report to this file instead of stdout");
}

struct Loaded {
    std::vector<workflow::WorkflowSpec> specs;
    workflow::ResourcePool pool;
    workflow::InstanceCounts counts;
    analysis::Weights weights;
    agents::Scenario scenario;
    bool has_pool = false;
};

Loaded load(const Options& o, bool need_pool) {
    auto set = load_inputs(o.inputs);
    if (!o.pool.empty()) set.pool = workflow::parse_pool(read_text(o.pool));
    if (!o.instances.empty()) set.counts = workflow::parse_instances(read_text(o.instances));
    if (!o.weights.empty()) set.weights = parse_weights(read_text(o.weights));
    if (!o.scenario.empty()) set.scenario = agents::parse_scenario(read_text(o.scenario));
    if (set.specs.empty()) throw Failed{2, "no workflow given"};
    if (need_pool && !set.pool) throw Failed{2, "no resource pool given (pool.txt or --pool)"};
    Loaded l;
    l.specs = std::move(set.specs);
    l.has_pool = set.pool.has_value();
    if (set.pool) l.pool = std::move(*set.pool);
    if (set.counts) l.counts = std::move(*set.counts);
    for (const auto& spec : l.specs) l.counts.try_emplace(spec.activity, 1);
    if (set.weights) {
        l.weights = std::move(*set.weights);
    } else {
        for (const auto& spec : l.specs) l.weights[spec.activity] = 1;
    }
    if (set.scenario) l.scenario = std::move(*set.scenario);
    return l;
}

pn::PetriNet global_net(const Loaded& l) { return workflow::compose_global(l.specs, l.pool, l.counts); }

std::string transition_labels(const pn::PetriNet& net, const std::vector<std::size_t>& ts) {
    std::vector<std::string> labels;
    for (const auto t : ts) labels.push_back(net.transitions()[t].label);
    return labels.empty() ? "-" : fmt::format("{}", fmt::join(labels, ","));
}

CommandOutcome validate(const Options& o) {
    const auto l = load(o, false);
    std::string report;
    if (l.has_pool) {
        if (const auto d = workflow::validate_pool(l.pool); !d.empty()) report += "pool:\n" + workflow::format_diagnostics(d);
    }
    for (const auto& spec : l.specs) {
        const auto d = l.has_pool ? workflow::validate_spec(spec, l.pool) : workflow::validate_structure(spec);
        if (!d.empty()) report += spec.activity + ":\n" + workflow::format_diagnostics(d);
    }
    if (report.empty()) {
        try {
            workflow::job_table(l.specs);
        } catch (const Error& e) {
            report += std::string(e.what()) + "\n";
        }
    }
    if (report.empty()) return {0, "ok\n", ""};
    return {1, report, ""};
}

CommandOutcome compose(const Options& o) { return {0, pn::serialize(global_net(load(o, true))), ""}; }

CommandOutcome reach(const Options& o) {
    const auto net = global_net(load(o, true));
    const auto g = analysis::reachability(net, o.node_cap);
    std::string out = fmt::format("nodes {}\nedges {}\nroot {}\n", g.size(), g.edges().size(), g.root());
    for (std::size_t i = 0; i < g.size(); ++i) out += fmt::format("node {} {}\n", i, pn::format_marking(net, g.nodes()[i]));
    for (const auto& e : g.edges()) {
        out += fmt::format("edge {} {} {}\n", e.source, net.transitions()[e.transition].label, e.target);
    }
    return {0, out, ""};
}

CommandOutcome deadlocks(const Options& o) {
    const auto net = global_net(load(o, true));
    const auto g = analysis::reachability(net, o.node_cap);
    const auto dead = analysis::find_deadlocks(g, workflow::completion_predicate(net));
    std::string out = fmt::format("states {}\ndeadlocks {}\n", g.size(), dead.size());
    for (const auto& m : dead) out += "deadlock " + pn::format_marking(net, m) + "\n";
    return {dead.empty() ? 0 : 1, out, ""};
}

analysis::MarkingPredicate forbidden_predicate(const Options& o, const pn::PetriNet& net, std::string& shown) {
    if (o.forbidden.empty()) {
        shown = "none";
        return [](const pn::Marking&) { return false; };
    }
    const auto expr = analysis::parse_state_expr(read_text(o.forbidden));
    shown = analysis::to_string(expr);
    return analysis::bind(expr, net);
}

CommandOutcome forbidden(const Options& o) {
    if (o.forbidden.empty()) throw Failed{2, "forbidden needs --forbidden <file>"};
    const auto net = global_net(load(o, true));
    std::string shown;
    const auto predicate = forbidden_predicate(o, net, shown);
    const auto g = analysis::reachability(net, o.node_cap);
    const auto hits = analysis::check_forbidden(g, predicate);
    std::string out = fmt::format("predicate {}\nstates {}\nforbidden {}\n", shown, g.size(), hits.size());
    for (const auto& m : hits) out += "reachable " + pn::format_marking(net, m) + "\n";
    return {hits.empty() ? 0 : 1, out, ""};
}

CommandOutcome synthesize(const Options& o) {
    const auto net = global_net(load(o, true));
    std::string shown;
    const auto predicate = forbidden_predicate(o, net, shown);
    const auto g = analysis::reachability(net, o.node_cap);
    // End transitions are not under the supervisor's control.
    const auto uncontrollable = [&](std::size_t t) { return !workflow::job_of_end(net.transitions()[t].label).empty(); };
    const auto policy = analysis::synthesize_supervisor(g, workflow::completion_predicate(net), predicate, uncontrollable);
    std::string out = fmt::format("predicate {}\nstates {} of {}\nallowed-edges {} of {}\n", shown,
                                  policy.entries().size(), g.size(), policy.allowed_edge_count(), g.edges().size());
    for (const auto& e : policy.entries()) {
        out += fmt::format("state {} allow {}\n", pn::format_marking(net, e.marking), transition_labels(net, e.allowed));
    }
    return {0, out, ""};
}

std::vector<analysis::RankedSchedule> ranked(const Loaded& l) {
    const auto net = global_net(l);
    const auto all = analysis::enumerate_schedules(net, workflow::job_table(l.specs), workflow::completion_predicate(net));
    return analysis::rank_schedules(all, l.weights);
}

CommandOutcome schedules(const Options& o) {
    const auto r = ranked(load(o, true));
    std::string out = fmt::format("schedules {}\n", r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        out += fmt::format("cost {} {}\n", i + 1, analysis::format_cost(r[i].second));
        out += analysis::format_schedule_lines(i + 1, r[i].first);
    }
    return {0, out, ""};
}

CommandOutcome rank(const Options& o) {
    const auto l = load(o, true);
    const auto r = ranked(l);
    std::string out;
    for (std::size_t i = 0; i < r.size(); ++i) {
        out += fmt::format("rank {} {} starts {}\n", i + 1, analysis::format_cost(r[i].second),
                           fmt::join(r[i].first.start_vector(), ","));
    }
    const auto recs = analysis::derive_recommendations(r.front().first, workflow::job_table(l.specs), l.pool);
    out += "best\n" + analysis::format_schedule_table(r.front().first, &recs);
    for (const auto& [instance, order] : recs.service_order) {
        out += fmt::format("serve {} {}\n", instance, fmt::join(order, ","));
    }
    return {0, out, ""};
}

CommandOutcome simulate(const Options& o) {
    const auto l = load(o, true);
    const auto r = ranked(l);
    agents::SimulationConfig c;
    c.specs = l.specs;
    c.pool = l.pool;
    c.counts = l.counts;
    c.budgets = l.scenario.budgets;
    c.prices = l.scenario.prices;
    c.breakdowns = l.scenario.breakdowns;
    c.weights = l.weights;
    c.recommendations = analysis::derive_recommendations(r.front().first, workflow::job_table(l.specs), l.pool);
    const auto trace = agents::run_simulation(c);
    std::string out = agents::format_trace(trace);
    int makespan = 0;
    for (const auto& [p, t] : trace.completion) makespan = std::max(makespan, t);
    out += fmt::format("completed {} blocked {} makespan {}\n", trace.completion.size(), trace.blocked.size(), makespan);
    return {trace.blocked.empty() ? 0 : 1, out, ""};
}

CommandOutcome kb_register(const Options& o) {
    auto templates = kb::load_static(o.kb);
    const auto models = kb::load_dynamic(o.kb);
    const auto set = load_inputs(o.inputs);
    if (set.specs.empty()) throw Failed{2, "no workflow given"};
    std::string out;
    for (const auto& spec : set.specs) out += "registered " + templates.register_template(spec) + "\n";
    kb::save(o.kb, templates, models);
    return {0, out, ""};
}

CommandOutcome kb_instantiate(const Options& o) {
    const auto templates = kb::load_static(o.kb);
    auto models = kb::load_dynamic(o.kb);
    auto set = load_inputs(o.inputs);
    if (!set.specs.empty()) throw Failed{2, "instantiate takes pool and instance files, not workflows"};
    if (!o.pool.empty()) set.pool = workflow::parse_pool(read_text(o.pool));
    if (!o.instances.empty()) set.counts = workflow::parse_instances(read_text(o.instances));
    if (!set.pool) throw Failed{2, "no resource pool given"};
    if (!set.counts) throw Failed{2, "no instance counts given"};
    const auto id = models.instantiate_model(templates, *set.counts, *set.pool);
    kb::save(o.kb, templates, models);
    return {0, fmt::format("model {}\n", id), ""};
}

CommandOutcome kb_retire(const Options& o) {
    const auto templates = kb::load_static(o.kb);
    auto models = kb::load_dynamic(o.kb);
    const auto id = text::to_int<kb::ModelId>(o.model);
    if (!id) throw Failed{2, "model id must be a number"};
    models.retire_model(*id);
    kb::save(o.kb, templates, models);
    return {0, fmt::format("retired {}\n", *id), ""};
}

CommandOutcome kb_list(const Options& o) {
    return {0, kb::format_listing(kb::load_static(o.kb), kb::load_dynamic(o.kb)), ""};
}

int exit_code_for(ErrorKind kind) { return kind == ErrorKind::Parse || kind == ErrorKind::Io ? 2 : 1; }

}  // namespace

CommandOutcome execute(std::span<const std::string> args) {
    CLI::App app{"Workflow nets: build, analyze, supervise, schedule and simulate.", "wfctl"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "help for every command");
    Options o;
    CommandOutcome (*run)(const Options&) = nullptr;

    const auto command = [&](CLI::App* parent, const char* name, const char* about, unsigned flags,
                             CommandOutcome (*fn)(const Options&), bool inputs = true) {
        auto* sub = parent->add_subcommand(name, about);
        if (inputs) sub->add_option("inputs", o.inputs, "workflow/pool/instance files or directories");
        add_flags(sub, o, flags);
        sub->callback([&run, fn] { run = fn; });
        return sub;
    };
    command(&app, "validate", "check workflows (and pool) for consistency", Pool, validate);
    command(&app, "compose", "print the global net", Pool | Instances, compose);
    command(&app, "reach", "print the reachability graph", Pool | Instances | NodeCap, reach);
    command(&app, "deadlocks", "list non-final dead markings", Pool | Instances | NodeCap, deadlocks);
    command(&app, "forbidden", "list reachable forbidden markings", Pool | Instances | NodeCap | Forbidden, forbidden);
    command(&app, "synthesize", "maximally permissive supervisor", Pool | Instances | NodeCap | Forbidden, synthesize);
    command(&app, "schedules", "enumerate eager schedules", Pool | Instances | WeightsFlag, schedules);
    command(&app, "rank", "rank schedules and derive recommendations", Pool | Instances | WeightsFlag, rank);
    command(&app, "simulate", "agent negotiation under supervisor recommendations",
            Pool | Instances | WeightsFlag | ScenarioFlag, simulate);
    auto* kb = app.add_subcommand("kb", "knowledge base lifecycle");
    kb->require_subcommand(1);
    command(kb, "register", "store workflow templates", Kb, kb_register);
    command(kb, "instantiate", "compose templates into a stored model", Kb | Pool | Instances, kb_instantiate);
    command(kb, "retire", "remove a stored model", Kb, kb_retire, false)->add_option("id", o.model)->required();
    command(kb, "list", "list templates and models", Kb, kb_list, false);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        std::ostringstream out, err;
        const int code = app.exit(e, out, err);
        if (code == 0) return {0, out.str(), err.str()};
        return {2, out.str(), err.str() + app.help()};
    }

    CommandOutcome outcome;
    try {
        outcome = run(o);
    } catch (const Failed& f) {
        return {f.code, "", "error: " + f.message + "\n"};
    } catch (const Error& e) {
        return {exit_code_for(e.kind()), "", fmt::format("error: {}: {}\n", to_string(e.kind()), e.what())};
    }
    if (!o.out.empty()) {
        std::ofstream file(o.out, std::ios::binary | std::ios::trunc);
        file << outcome.out;
        if (!file) return {2, "", "error: cannot write " + o.out + "\n"};
        outcome.out.clear();
    }
    return outcome;
}

}  // namespace wfctl::cli
