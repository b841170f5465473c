#include <algorithm>

#include "doctest.h"
#include "support/oracles.hpp"
#include "wfctl/analysis/reachability.hpp"
#include "wfctl/error.hpp"
#include "wfctl/workflow/build.hpp"
#include "wfctl/workflow/format.hpp"

using namespace wfctl;
using namespace wfctl::workflow;

namespace {

bool has_kind(const std::vector<Diagnostic>& diags, DiagnosticKind kind) {
    return std::any_of(diags.begin(), diags.end(), [&](const Diagnostic& d) { return d.kind == kind; });
}

std::size_t place(const pn::PetriNet& net, const std::string& label) {
    const auto p = net.find_place_by_label(label);
    REQUIRE(p);
    return *p;
}

}  // namespace

TEST_CASE("validate_spec") {
    const auto cs = oracle::case_study();
    for (const auto& spec : cs.specs) CHECK(validate_spec(spec, cs.pool).empty());

    WorkflowSpec bad{"X", {{"a", "X", 1, {{"R5", 1}}}}, {}};
    CHECK(has_kind(validate_spec(bad, cs.pool), DiagnosticKind::UnknownResource));

    WorkflowSpec cyc{"X", {{"a", "X", 1, {{"R1", 1}}}, {"b", "X", 1, {{"R1", 1}}}},
                     {Precedence{"a", "b"}, Precedence{"b", "a"}}};
    CHECK(has_kind(validate_spec(cyc, cs.pool), DiagnosticKind::CyclicPrecedence));

    WorkflowSpec many{"X",
                      {{"a", "X", 0, {{"R1", 3}}}, {"a", "X", 1, {}}},
                      {Precedence{"a", "zz"}, NonOverlap{"a", "a"}}};
    const auto diags = validate_spec(many, cs.pool);
    CHECK(has_kind(diags, DiagnosticKind::DemandExceedsCapacity));
    CHECK(has_kind(diags, DiagnosticKind::DuplicateJob));
    CHECK(has_kind(diags, DiagnosticKind::UnknownJob));
    CHECK(has_kind(diags, DiagnosticKind::InvalidDuration));
    CHECK(has_kind(diags, DiagnosticKind::EmptyDemand));
}

TEST_CASE("workflow file format") {
    const auto specs = parse_workflows(
        "# comment\n\nworkflow A1\njob J11 duration 3 uses R1 R3\njob J12 duration 1 uses R3*2\nbefore J11 J12\n"
        "workflow B\njob K duration 1 uses R1\n");
    REQUIRE(specs.size() == 2);
    CHECK(specs[0].jobs[1].demand == Demand{{"R3", 2}});
    CHECK(specs[0].jobs[0].activity == "A1");
    CHECK(parse_workflows(serialize(specs[0]))[0] == specs[0]);

    const auto cs = oracle::case_study();
    for (const auto& spec : cs.specs) CHECK(parse_workflows(serialize(spec)).at(0) == spec);
    CHECK(parse_pool(serialize(cs.pool)) == cs.pool);
    CHECK(parse_instances(serialize(cs.counts)) == cs.counts);

    const auto line_of = [](const std::string& text, auto parser) -> std::int64_t {
        try {
            parser(text);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Parse);
            return e.detail();
        }
        return -1;
    };
    CHECK(line_of("workflow A\njob J duration x uses R1\n", parse_workflows) == 2);
    CHECK(line_of("job J duration 1 uses R1\n", parse_workflows) == 1);
    CHECK(line_of("workflow A\n\n\nfrob a b\n", parse_workflows) == 4);
    CHECK(line_of("resource R1 capacity 0\n", parse_pool) == 1);
    CHECK(line_of("instances A1 1\ninstances A1 2\n", parse_instances) == 2);
}

TEST_CASE("single-job activity net") {
    const WorkflowSpec spec{"S", {{"J", "S", 2, {{"R1", 1}, {"R2", 1}}}}, {}};
    const auto net = activity_to_net(spec);
    std::vector<std::string> labels;
    for (const auto& p : net.places()) labels.push_back(p.label);
    std::sort(labels.begin(), labels.end());
    CHECK(labels == std::vector<std::string>{"R1", "R2", "done_S", "exec_J", "pending_J"});
    CHECK(net.transition_count() == 2);
    for (const auto& p : net.places()) CHECK(p.tokens == 0);
}

TEST_CASE("A1 translates to a linear chain with waiting places") {
    const auto cs = oracle::case_study();
    const auto net = activity_to_net(cs.specs[0]);
    CHECK(net.find_place_by_label("wait_J11_J12"));
    CHECK(net.find_place_by_label("wait_J12_J13"));
    const auto wait = net.find_place_by_label("wait_J11_J12");
    bool fed_by_end = false, feeds_start = false;
    for (const auto& a : net.output_arcs()) fed_by_end |= a.place == net.places()[*wait].id && a.transition == "end_J11";
    for (const auto& a : net.input_arcs()) feeds_start |= a.place == net.places()[*wait].id && a.transition == "start_J12";
    CHECK(fed_by_end);
    CHECK(feeds_start);
}

TEST_CASE("A2 mutex keeps J22 and J23 apart and each runs once") {
    const auto cs = oracle::case_study();
    const std::vector<WorkflowSpec> specs{cs.specs[1]};
    const auto net = compose_global(specs, cs.pool, {{"A2", 1}});
    CHECK(net.places()[place(net, "mutex_J22_J23")].tokens == 1);
    const auto g = analysis::reachability(net, 100000);
    const auto e22 = place(net, "exec_J22");
    const auto e23 = place(net, "exec_J23");
    for (const auto& m : g.nodes()) CHECK_FALSE((m[e22] > 0 && m[e23] > 0));
    const auto final_nodes = std::count_if(g.nodes().begin(), g.nodes().end(), completion_predicate(net));
    CHECK(final_nodes == 1);
    const auto& fin = *std::find_if(g.nodes().begin(), g.nodes().end(), completion_predicate(net));
    CHECK(fin[place(net, "done_A2")] == 2);
}

TEST_CASE("compose_global markings") {
    const auto cs = oracle::case_study();
    const auto empty = compose_global({}, cs.pool, {});
    CHECK(empty.place_count() == 4);
    CHECK(empty.initial_marking() == pn::Marking({2, 1, 1, 1}));

    const auto net = compose_global(cs.specs, cs.pool, cs.counts);
    const auto m = net.initial_marking();
    for (const auto& [r, cap] : cs.pool.capacity) CHECK(m[place(net, r)] == cap);
    for (const char* entry : {"pending_J11", "pending_J21", "pending_J31", "pending_J32"}) CHECK(m[place(net, entry)] == 1);
    // 4 resource places + 9 job blocks (pending, exec, start, end)
    int resource_places = 0, exec_places = 0;
    for (const auto& p : net.places()) {
        resource_places += p.label.size() == 2 && p.label[0] == 'R';
        exec_places += p.label.starts_with("exec_");
    }
    CHECK(resource_places == 4);
    CHECK(exec_places == 9);
    CHECK(net.transition_count() == 18);

    auto counts = cs.counts;
    counts["A1"] = 2;
    const auto twice = compose_global(cs.specs, cs.pool, counts);
    CHECK(twice.initial_marking()[place(twice, "pending_J11")] == 2);
    CHECK(twice.initial_marking()[place(twice, "pending_J21")] == 1);

    CHECK_THROWS_AS(compose_global(cs.specs, cs.pool, {{"A1", 1}}), Error);
    std::vector<WorkflowSpec> clash{cs.specs[0], cs.specs[0]};
    clash[1].activity = "B";
    CHECK_THROWS_AS(compose_global(clash, cs.pool, {{"A1", 1}, {"B", 1}}), Error);
}

TEST_CASE("translation is deterministic") {
    const auto cs = oracle::case_study();
    CHECK(pn::serialize(compose_global(cs.specs, cs.pool, cs.counts)) ==
          pn::serialize(compose_global(cs.specs, cs.pool, cs.counts)));
    CHECK(pn::serialize(activity_to_net(cs.specs[2])) == pn::serialize(activity_to_net(cs.specs[2])));
}

TEST_CASE("resource P-invariant and exactly-once on random workflows") {
    std::mt19937 rng(21);
    for (int round = 0; round < 60; ++round) {
        const auto inst = oracle::random_instance(rng, 5, 2);
        const auto net = compose_global(inst.specs, inst.pool, inst.counts);
        const auto jobs = job_table(inst.specs);
        const auto g = analysis::reachability(net, 200000);
        for (const auto& m : g.nodes()) CHECK(resource_invariant_violations(net, jobs, inst.pool, m).empty());
        for (const auto& spec : inst.specs) {
            for (const auto& c : spec.constraints) {
                if (const auto* n = std::get_if<NonOverlap>(&c)) {
                    const auto a = place(net, exec_place(n->first));
                    const auto b = place(net, exec_place(n->second));
                    for (const auto& m : g.nodes()) CHECK_FALSE((m[a] > 0 && m[b] > 0));
                }
            }
        }
        // Exactly-once: every complete run fires each start `count` times, so
        // along any path the number of start_J firings equals the drop in pending_J.
        const auto is_final = completion_predicate(net);
        for (const auto& m : g.nodes()) {
            if (!is_final(m)) continue;
            for (const auto& spec : inst.specs) {
                for (const auto& job : spec.jobs) CHECK(m[place(net, pending_place(job.id))] == 0);
            }
        }
    }
}
