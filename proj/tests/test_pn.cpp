#include <random>
#include <set>

#include "doctest.h"
#include "support/oracles.hpp"
#include "wfctl/error.hpp"
#include "wfctl/pn/net.hpp"
#include "wfctl/workflow/build.hpp"

using namespace wfctl;
using namespace wfctl::pn;

namespace {

PetriNet line_net(Count tokens) {
    return PetriNet({{"p1", "p1", tokens}, {"p2", "p2", 0}}, {{"t", "t"}}, {{"p1", "t", 1}}, {{"t", "p2", 1}});
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::Io;
}

// Random net whose every node carries a label drawn from a small alphabet so
// that composition fuses some of them.
PetriNet random_labelled_net(std::mt19937& rng, int salt) {
    std::uniform_int_distribution<int> small(0, 3);
    std::vector<Place> places;
    std::vector<Transition> transitions;
    std::set<std::string> used;
    const int np = std::uniform_int_distribution<int>(1, 4)(rng);
    for (int i = 0; i < np; ++i) {
        const int pick = small(rng);
        std::string label = pick < 2 ? "shared" + std::to_string(pick) : "own" + std::to_string(salt) + "_" + std::to_string(i);
        if (!used.insert(label).second) continue;
        places.push_back({"p" + std::to_string(i), label, pick < 2 ? pick : small(rng)});
    }
    const int nt = std::uniform_int_distribution<int>(0, 3)(rng);
    for (int i = 0; i < nt; ++i) {
        const int pick = small(rng);
        std::string label = pick == 0 ? "sync" : "tr" + std::to_string(salt) + "_" + std::to_string(i);
        if (!used.insert(label).second) continue;
        transitions.push_back({"t" + std::to_string(i), label});
    }
    std::vector<InputArc> in;
    std::vector<OutputArc> out;
    for (const auto& t : transitions) {
        for (const auto& p : places) {
            // arcs touching fused nodes are fixed per label pair so fusion never
            // sees conflicting weights
            const bool fused = p.label.starts_with("shared") && t.label == "sync";
            const int roll = fused ? static_cast<int>(p.label.back() - '0') : small(rng);
            if (roll == 0) in.push_back({p.id, t.id, 1});
            if (roll == 1) out.push_back({t.id, p.id, fused ? 2 : 1});
        }
    }
    return PetriNet(places, transitions, in, out);
}

// Label-level canonical form: fused nets are compared by labels, not ids.
std::string canonical(const PetriNet& net) {
    std::set<std::string> lines;
    for (const auto& p : net.places()) lines.insert("P " + p.label + " " + std::to_string(p.tokens));
    for (const auto& t : net.transitions()) lines.insert("T " + t.label);
    const auto plabel = [&](const std::string& id) { return net.places()[net.place_index(id)].label; };
    const auto tlabel = [&](const std::string& id) { return net.transitions()[net.transition_index(id)].label; };
    for (const auto& a : net.input_arcs()) lines.insert("I " + plabel(a.place) + " " + tlabel(a.transition) + " " + std::to_string(a.weight));
    for (const auto& a : net.output_arcs()) lines.insert("O " + tlabel(a.transition) + " " + plabel(a.place) + " " + std::to_string(a.weight));
    std::string s;
    for (const auto& l : lines) s += l + "\n";
    return s;
}

}  // namespace

TEST_CASE("enabling rule") {
    const auto net = line_net(1);
    CHECK(enabled_transitions(net, net.initial_marking()) == std::vector<std::string>{"t"});
    CHECK(enabled_transitions(net, Marking({0, 0})).empty());
    CHECK(kind_of([&] { enabled_transitions(net, Marking({1})); }) == ErrorKind::StructuralMismatch);
    CHECK(kind_of([&] { net.marking_from({{"nope", 1}}); }) == ErrorKind::StructuralMismatch);
}

TEST_CASE("firing is pure and checks enabling") {
    const auto net = line_net(1);
    const Marking m = net.initial_marking();
    CHECK(fire(net, m, "t") == Marking({0, 1}));
    CHECK(m == Marking({1, 0}));
    CHECK(kind_of([&] { fire(net, Marking({0, 1}), "t"); }) == ErrorKind::NotEnabled);
    CHECK(kind_of([&] { fire(net, m, "zz"); }) == ErrorKind::StructuralMismatch);
}

TEST_CASE("construction rejects malformed nets") {
    CHECK(kind_of([] { PetriNet({{"p", "", 0}, {"p", "", 0}}, {}, {}, {}); }) == ErrorKind::StructuralMismatch);
    CHECK(kind_of([] { PetriNet({{"p", "", -1}}, {}, {}, {}); }) == ErrorKind::StructuralMismatch);
    CHECK(kind_of([] { PetriNet({{"p", "", 0}}, {{"t", ""}}, {{"p", "t", 0}}, {}); }) == ErrorKind::StructuralMismatch);
    CHECK(kind_of([] { PetriNet({{"p", "", 0}}, {{"t", ""}}, {{"q", "t", 1}}, {}); }) == ErrorKind::StructuralMismatch);
    CHECK(kind_of([] { PetriNet({{"p q", "", 0}}, {}, {}, {}); }) == ErrorKind::StructuralMismatch);
}

TEST_CASE("fusion by label") {
    const PetriNet a({{"r", "R1", 2}, {"x", "", 0}}, {{"ta", ""}}, {{"r", "ta", 1}}, {{"ta", "x", 1}});
    const PetriNet b({{"r", "R1", 2}, {"y", "", 0}}, {{"tb", ""}}, {{"r", "tb", 1}}, {{"tb", "y", 1}});
    const std::vector<PetriNet> both{a, b};
    const auto fused = fuse_compose(both);
    CHECK(fused.place_count() == 3);
    const auto r = fused.find_place_by_label("R1");
    REQUIRE(r);
    CHECK(fused.places()[*r].tokens == 2);
    CHECK(fused.places()[*r].id == "0.r");
    CHECK(fused.input_arcs().size() == 2);

    const std::vector<PetriNet> single{a};
    CHECK(canonical(fuse_compose(single)) == canonical(a));

    const PetriNet c({{"r", "R1", 1}}, {}, {}, {});
    const std::vector<PetriNet> conflict{a, c};
    CHECK(kind_of([&] { fuse_compose(conflict); }) == ErrorKind::FusionConflict);
    const PetriNet dup({{"r", "R1", 0}, {"s", "R1", 0}}, {}, {}, {});
    const std::vector<PetriNet> dups{dup};
    CHECK(kind_of([&] { fuse_compose(dups); }) == ErrorKind::FusionConflict);
    CHECK(kind_of([] { fuse_compose({}); }) == ErrorKind::StructuralMismatch);
}

TEST_CASE("transition fusion unions arcs") {
    const PetriNet a({{"p", "pa", 1}}, {{"t", "go"}}, {{"p", "t", 1}}, {});
    const PetriNet b({{"q", "qb", 1}}, {{"u", "go"}}, {{"q", "u", 1}}, {});
    const std::vector<PetriNet> nets{a, b};
    const auto fused = fuse_compose(nets);
    REQUIRE(fused.transition_count() == 1);
    CHECK(fused.input_arcs().size() == 2);
    CHECK(enabled_transitions(fused, fused.marking_from({{"0.p", 1}})).empty());
    CHECK(enabled_transitions(fused, fused.initial_marking()).size() == 1);
}

TEST_CASE("composition is associative and commutative up to labels") {
    std::mt19937 rng(11);
    for (int round = 0; round < 300; ++round) {
        const auto a = random_labelled_net(rng, 1);
        const auto b = random_labelled_net(rng, 2);
        const auto c = random_labelled_net(rng, 3);
        const std::vector<PetriNet> ab{a, b}, ba{b, a}, bc{b, c};
        const auto fab = fuse_compose(ab);
        const auto fbc = fuse_compose(bc);
        CHECK(canonical(fab) == canonical(fuse_compose(ba)));
        const std::vector<PetriNet> left{fab, c}, right{a, fbc}, flat{a, b, c};
        CHECK(canonical(fuse_compose(left)) == canonical(fuse_compose(flat)));
        CHECK(canonical(fuse_compose(right)) == canonical(fuse_compose(flat)));
    }
}

TEST_CASE("firing semantics properties on random nets") {
    std::mt19937 rng(3);
    for (int round = 0; round < 300; ++round) {
        const auto net = random_labelled_net(rng, round);
        // swap arcs to build the reverse net
        std::vector<InputArc> rin;
        std::vector<OutputArc> rout;
        for (const auto& a : net.output_arcs()) rin.push_back({a.place, a.transition, a.weight});
        for (const auto& a : net.input_arcs()) rout.push_back({a.transition, a.place, a.weight});
        const PetriNet reverse(net.places(), net.transitions(), rin, rout);

        Marking m = net.initial_marking();
        for (int step = 0; step < 6; ++step) {
            const auto enabled = enabled_indices(net, m);
            if (enabled.empty()) break;
            const auto t = enabled[std::uniform_int_distribution<std::size_t>(0, enabled.size() - 1)(rng)];
            const Marking next = fire(net, m, t);
            for (const auto c : next.counts()) CHECK(c >= 0);
            CHECK_NOTHROW(enabled_indices(net, next));
            CHECK(fire(reverse, next, net.transitions()[t].id) == m);
            m = next;
        }
    }
}

TEST_CASE("serialization is line-exact and round-trips") {
    const PetriNet net({{"b", "-x", 1}, {"a", "", 0}}, {{"t", "go"}}, {{"a", "t", 2}}, {{"t", "b", 1}});
    const std::string text = serialize(net);
    CHECK(text == "place a - 0\nplace b -x 1\ntransition t go\nin a t 2\nout t b 1\n");
    CHECK(serialize(parse_net(text)) == text);
    CHECK(parse_net(text) == net);

    std::mt19937 rng(5);
    for (int round = 0; round < 100; ++round) {
        const auto n = random_labelled_net(rng, round);
        CHECK(serialize(parse_net(serialize(n))) == serialize(n));
    }

    try {
        parse_net("place a - 0\nbogus\n");
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Parse);
        CHECK(e.detail() == 2);
    }
}

TEST_CASE("case-study global net enabling and firing") {
    const auto cs = oracle::case_study();
    const auto net = workflow::compose_global(cs.specs, cs.pool, cs.counts);
    const auto m0 = net.initial_marking();
    std::vector<std::string> enabled;
    for (const auto t : enabled_indices(net, m0)) enabled.push_back(net.transitions()[t].label);
    std::sort(enabled.begin(), enabled.end());
    CHECK(enabled == std::vector<std::string>{"start_J11", "start_J21", "start_J31", "start_J32"});

    const auto at = [&](const Marking& m, const std::string& label) { return m[*net.find_place_by_label(label)]; };
    const auto m1 = fire(net, m0, *net.find_transition_by_label("start_J11"));
    CHECK(at(m0, "R1") == 2);
    CHECK(at(m1, "R1") == 1);
    CHECK(at(m0, "R3") == 1);
    CHECK(at(m1, "R3") == 0);
    CHECK(at(m0, "pending_J11") == 1);
    CHECK(at(m1, "pending_J11") == 0);
    CHECK(at(m1, "exec_J11") == 1);
}
