#include <random>

#include "doctest.h"
#include "support/oracles.hpp"
#include "wfctl/analysis/predicate.hpp"
#include "wfctl/analysis/supervisor.hpp"
#include "wfctl/error.hpp"
#include "wfctl/workflow/build.hpp"

using namespace wfctl;
using namespace wfctl::analysis;
using pn::Marking;

namespace {

oracle::TinyGraph to_tiny(const ReachabilityGraph& g, const MarkingPredicate& is_final, const MarkingPredicate& forbidden,
                          const TransitionPredicate& unc) {
    oracle::TinyGraph t;
    t.nodes = static_cast<int>(g.size());
    for (const auto& m : g.nodes()) {
        t.final_state.push_back(is_final(m));
        t.forbidden.push_back(forbidden(m));
    }
    for (const auto& e : g.edges()) {
        t.edges.emplace_back(static_cast<int>(e.source), static_cast<int>(e.target), unc && unc(e.transition));
    }
    return t;
}

// Compares a synthesized policy with the oracle's maximal good set.
void check_against_oracle(const ReachabilityGraph& g, const MarkingPredicate& is_final,
                          const MarkingPredicate& forbidden, const TransitionPredicate& unc) {
    const auto tiny = to_tiny(g, is_final, forbidden, unc);
    std::vector<bool> good = oracle::naive_good_set(tiny);
    if (tiny.nodes <= 14) {
        const auto mask = oracle::maximal_good_set(tiny);
        for (int v = 0; v < tiny.nodes; ++v) CHECK(good[v] == static_cast<bool>(mask >> v & 1u));
    }
    if (!good[g.root()]) {
        CHECK_THROWS_AS(synthesize_supervisor(g, is_final, forbidden, unc), Error);
        return;
    }
    const auto policy = synthesize_supervisor(g, is_final, forbidden, unc);
    // Expected domain: good nodes reachable from root through good nodes.
    std::vector<bool> reach(g.size(), false);
    std::vector<std::size_t> stack{g.root()};
    reach[g.root()] = true;
    while (!stack.empty()) {
        const auto u = stack.back();
        stack.pop_back();
        for (const auto& e : g.out_edges(u)) {
            if (good[e.target] && !reach[e.target]) {
                reach[e.target] = true;
                stack.push_back(e.target);
            }
        }
    }
    std::size_t domain = 0;
    for (std::size_t v = 0; v < g.size(); ++v) {
        const auto* allowed = policy.allowed(g.nodes()[v]);
        CHECK(static_cast<bool>(allowed) == reach[v]);
        if (!allowed) continue;
        ++domain;
        std::vector<std::size_t> expected;
        for (const auto& e : g.out_edges(v)) {
            if (good[e.target]) expected.push_back(e.transition);
        }
        CHECK(*allowed == expected);
        // (b) no non-final sinks
        CHECK((is_final(g.nodes()[v]) || !allowed->empty()));
        // maximality: every removed edge leads outside the good set
        for (const auto& e : g.out_edges(v)) {
            if (std::find(allowed->begin(), allowed->end(), e.transition) == allowed->end()) {
                CHECK_FALSE(good[e.target]);
            }
        }
    }
    CHECK(domain == policy.entries().size());
}

}  // namespace

TEST_CASE("deadlock-free graph keeps every edge") {
    const auto cs = oracle::case_study();
    const auto net = workflow::compose_global(cs.specs, cs.pool, cs.counts);
    const auto g = reachability(net, 100000);
    const auto policy = synthesize_supervisor(g, workflow::completion_predicate(net), [](const Marking&) { return false; });
    CHECK(policy.entries().size() == g.size());
    CHECK(policy.allowed_edge_count() == g.edges().size());
}

TEST_CASE("forbidden root means no supervisor") {
    const pn::PetriNet net({{"p", "p", 1}}, {}, {}, {});
    const auto g = reachability(net, 10);
    try {
        synthesize_supervisor(g, [](const Marking&) { return true; }, [](const Marking&) { return true; });
        FAIL("expected no-supervisor");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NoSupervisor);
    }
}

TEST_CASE("branch into a deadlocked path is cut") {
    // root --good--> final ; root --bad--> dead end
    const pn::PetriNet net({{"s", "", 1}, {"f", "", 0}, {"d", "", 0}}, {{"bad", ""}, {"good", ""}},
                           {{"s", "good", 1}, {"s", "bad", 1}}, {{"good", "f", 1}, {"bad", "d", 1}});
    const auto g = reachability(net, 10);
    REQUIRE(g.size() == 3);
    const auto is_final = [&](const Marking& m) { return m[net.place_index("f")] == 1; };
    const auto policy = synthesize_supervisor(g, is_final, [](const Marking&) { return false; });
    const auto* allowed = policy.allowed(net.initial_marking());
    REQUIRE(allowed);
    CHECK(*allowed == std::vector<std::size_t>{net.transition_index("good")});
    check_against_oracle(g, is_final, [](const Marking&) { return false; }, {});
}

TEST_CASE("random tiny graphs agree with subset enumeration") {
    std::mt19937 rng(17);
    for (int round = 0; round < 400; ++round) {
        const int n = std::uniform_int_distribution<int>(1, 10)(rng);
        std::vector<Marking> nodes;
        for (int i = 0; i < n; ++i) nodes.push_back(Marking({i}));
        std::vector<Edge> edges;
        std::bernoulli_distribution edge(0.25);
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                if (edge(rng)) edges.push_back({static_cast<std::size_t>(a), 0, static_cast<std::size_t>(b)});
            }
        }
        // one transition per edge keeps allowed-sets edge-exact
        for (std::size_t i = 0; i < edges.size(); ++i) edges[i].transition = i;
        const ReachabilityGraph g(nodes, edges, 0);
        std::vector<bool> fin(n), bad(n), unc(edges.size());
        for (int i = 0; i < n; ++i) {
            fin[i] = std::bernoulli_distribution(0.3)(rng);
            bad[i] = std::bernoulli_distribution(0.15)(rng);
        }
        for (auto&& u : unc) u = std::bernoulli_distribution(0.2)(rng);
        const auto is_final = [fin](const Marking& m) { return fin[m[0]]; };
        const auto forbidden = [bad](const Marking& m) { return bad[m[0]]; };
        check_against_oracle(g, is_final, forbidden, {});
        check_against_oracle(g, is_final, forbidden, [unc](std::size_t t) { return static_cast<bool>(unc[t]); });
    }
}

TEST_CASE("random workflows with forbidden co-execution") {
    std::mt19937 rng(23);
    for (int round = 0; round < 120; ++round) {
        const auto inst = oracle::random_instance(rng, 6, 1);
        const auto net = workflow::compose_global(inst.specs, inst.pool, inst.counts);
        const auto g = reachability(net, 500000);
        // forbid two random jobs executing together
        std::vector<std::string> jobs;
        for (const auto& s : inst.specs) {
            for (const auto& j : s.jobs) jobs.push_back(j.id);
        }
        const auto& a = jobs[std::uniform_int_distribution<std::size_t>(0, jobs.size() - 1)(rng)];
        const auto& b = jobs[std::uniform_int_distribution<std::size_t>(0, jobs.size() - 1)(rng)];
        const auto forbidden = bind(parse_state_expr("mark(" + workflow::exec_place(a) + ") >= 1 and mark(" +
                                                     workflow::exec_place(b) + ") >= 1"),
                                    net);
        const auto is_final = workflow::completion_predicate(net);
        check_against_oracle(g, is_final, forbidden, {});
        const auto ends = [&](std::size_t t) { return !workflow::job_of_end(net.transitions()[t].label).empty(); };
        check_against_oracle(g, is_final, forbidden, ends);
    }
}
