#include "wfctl/pn/net.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

#include "common/text.hpp"
#include "wfctl/error.hpp"

namespace wfctl::pn {

namespace {

[[noreturn]] void mismatch(const std::string& message) {
    throw Error(ErrorKind::StructuralMismatch, message);
}

template <typename T>
std::optional<std::size_t> find_by_id(const std::vector<T>& items, std::string_view id) {
    const auto it = std::lower_bound(items.begin(), items.end(), id,
                                     [](const T& item, std::string_view key) { return item.id < key; });
    if (it == items.end() || it->id != id) return std::nullopt;
    return static_cast<std::size_t>(it - items.begin());
}

template <typename T>
std::optional<std::size_t> find_by_label(const std::vector<T>& items, std::string_view label) {
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (!items[i].label.empty() && items[i].label == label) return i;
    }
    return std::nullopt;
}

void check_name(std::string_view what, std::string_view name, bool allow_empty) {
    if (name.empty() && allow_empty) return;
    if (!text::is_word(name) || name == "-") mismatch(fmt::format("invalid {} '{}'", what, name));
}

}  // namespace

std::size_t MarkingHash::operator()(const Marking& m) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (const Count c : m.counts()) {
        h ^= static_cast<std::size_t>(static_cast<std::uint32_t>(c));
        h *= 1099511628211ULL;
    }
    return h;
}

PetriNet::PetriNet(std::vector<Place> places, std::vector<Transition> transitions,
                   std::vector<InputArc> inputs, std::vector<OutputArc> outputs)
    : places_(std::move(places)),
      transitions_(std::move(transitions)),
      inputs_(std::move(inputs)),
      outputs_(std::move(outputs)) {
    std::sort(places_.begin(), places_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    std::sort(transitions_.begin(), transitions_.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    std::sort(inputs_.begin(), inputs_.end(), [](const auto& a, const auto& b) {
        return std::tie(a.place, a.transition) < std::tie(b.place, b.transition);
    });
    std::sort(outputs_.begin(), outputs_.end(), [](const auto& a, const auto& b) {
        return std::tie(a.transition, a.place) < std::tie(b.transition, b.place);
    });

    for (std::size_t i = 0; i < places_.size(); ++i) {
        check_name("place id", places_[i].id, false);
        check_name("place label", places_[i].label, true);
        if (places_[i].tokens < 0) mismatch(fmt::format("negative tokens on place '{}'", places_[i].id));
        if (i > 0 && places_[i - 1].id == places_[i].id) mismatch("duplicate place id '" + places_[i].id + "'");
    }
    for (std::size_t i = 0; i < transitions_.size(); ++i) {
        check_name("transition id", transitions_[i].id, false);
        check_name("transition label", transitions_[i].label, true);
        if (i > 0 && transitions_[i - 1].id == transitions_[i].id) {
            mismatch("duplicate transition id '" + transitions_[i].id + "'");
        }
    }

    const std::size_t np = places_.size();
    pre_.assign(transitions_.size() * np, 0);
    delta_.assign(transitions_.size() * np, 0);
    for (std::size_t i = 0; i < inputs_.size(); ++i) {
        const auto& arc = inputs_[i];
        const auto p = find_place(arc.place);
        const auto t = find_transition(arc.transition);
        if (!p || !t) mismatch(fmt::format("input arc {} -> {} names an unknown node", arc.place, arc.transition));
        if (arc.weight < 1) mismatch(fmt::format("input arc {} -> {} has weight < 1", arc.place, arc.transition));
        if (i > 0 && inputs_[i - 1].place == arc.place && inputs_[i - 1].transition == arc.transition) {
            mismatch(fmt::format("duplicate input arc {} -> {}", arc.place, arc.transition));
        }
        pre_[*t * np + *p] = arc.weight;
        delta_[*t * np + *p] -= arc.weight;
    }
    for (std::size_t i = 0; i < outputs_.size(); ++i) {
        const auto& arc = outputs_[i];
        const auto p = find_place(arc.place);
        const auto t = find_transition(arc.transition);
        if (!p || !t) mismatch(fmt::format("output arc {} -> {} names an unknown node", arc.transition, arc.place));
        if (arc.weight < 1) mismatch(fmt::format("output arc {} -> {} has weight < 1", arc.transition, arc.place));
        if (i > 0 && outputs_[i - 1].transition == arc.transition && outputs_[i - 1].place == arc.place) {
            mismatch(fmt::format("duplicate output arc {} -> {}", arc.transition, arc.place));
        }
        delta_[*t * np + *p] += arc.weight;
    }
}

std::optional<std::size_t> PetriNet::find_place(std::string_view id) const { return find_by_id(places_, id); }
std::optional<std::size_t> PetriNet::find_transition(std::string_view id) const {
    return find_by_id(transitions_, id);
}
std::optional<std::size_t> PetriNet::find_place_by_label(std::string_view label) const {
    return find_by_label(places_, label);
}
std::optional<std::size_t> PetriNet::find_transition_by_label(std::string_view label) const {
    return find_by_label(transitions_, label);
}

std::size_t PetriNet::place_index(std::string_view id) const {
    if (const auto i = find_place(id)) return *i;
    mismatch(fmt::format("unknown place '{}'", id));
}

std::size_t PetriNet::transition_index(std::string_view id) const {
    if (const auto i = find_transition(id)) return *i;
    mismatch(fmt::format("unknown transition '{}'", id));
}

Marking PetriNet::initial_marking() const {
    std::vector<Count> counts;
    counts.reserve(places_.size());
    for (const auto& p : places_) counts.push_back(p.tokens);
    return Marking(std::move(counts));
}

Marking PetriNet::marking_from(const std::map<std::string, Count>& by_id) const {
    std::vector<Count> counts(places_.size(), 0);
    for (const auto& [id, n] : by_id) {
        if (n < 0) mismatch(fmt::format("negative count for place '{}'", id));
        counts[place_index(id)] = n;
    }
    return Marking(std::move(counts));
}

PetriNet PetriNet::with_initial_marking(const Marking& m) const {
    check_marking(m);
    if (kernels::any_negative(m.counts())) mismatch("marking has negative counts");
    PetriNet copy = *this;
    for (std::size_t i = 0; i < copy.places_.size(); ++i) copy.places_[i].tokens = m[i];
    return copy;
}

std::span<const Count> PetriNet::pre(std::size_t t) const {
    return std::span<const Count>(pre_).subspan(t * places_.size(), places_.size());
}

std::span<const Count> PetriNet::delta(std::size_t t) const {
    return std::span<const Count>(delta_).subspan(t * places_.size(), places_.size());
}

void PetriNet::check_marking(const Marking& m) const {
    if (m.size() != places_.size()) {
        mismatch(fmt::format("marking has {} entries, net has {} places", m.size(), places_.size()));
    }
}

std::vector<std::size_t> enabled_indices(const PetriNet& net, const Marking& m) {
    net.check_marking(m);
    std::vector<std::size_t> enabled;
    const auto& k = kernels::active();
    const std::size_t np = net.place_count();
    for (std::size_t t = 0; t < net.transition_count(); ++t) {
        if (k.covers(m.counts().data(), net.pre_.data() + t * np, np)) enabled.push_back(t);
    }
    return enabled;
}

std::vector<std::string> enabled_transitions(const PetriNet& net, const Marking& m) {
    std::vector<std::string> ids;
    for (const auto t : enabled_indices(net, m)) ids.push_back(net.transitions()[t].id);
    return ids;
}

Marking fire(const PetriNet& net, const Marking& m, std::size_t t) {
    net.check_marking(m);
    if (t >= net.transition_count()) mismatch(fmt::format("transition index {} out of range", t));
    const std::size_t np = net.place_count();
    const auto& k = kernels::active();
    if (!k.covers(m.counts().data(), net.pre_.data() + t * np, np)) {
        throw Error(ErrorKind::NotEnabled, "transition '" + net.transitions()[t].id + "' is not enabled");
    }
    std::vector<Count> next(np);
    k.add(m.counts().data(), net.delta_.data() + t * np, next.data(), np);
    return Marking(std::move(next));
}

Marking fire(const PetriNet& net, const Marking& m, std::string_view transition_id) {
    return fire(net, m, net.transition_index(transition_id));
}

PetriNet fuse_compose(std::span<const PetriNet> nets) {
    if (nets.empty()) throw Error(ErrorKind::StructuralMismatch, "fuse_compose needs at least one net");

    std::vector<Place> places;
    std::vector<Transition> transitions;
    std::map<std::string, std::size_t> place_by_label;
    std::map<std::string, std::size_t> transition_by_label;
    std::set<std::tuple<std::string, std::string, Count>> inputs;
    std::set<std::tuple<std::string, std::string, Count>> outputs;

    for (std::size_t k = 0; k < nets.size(); ++k) {
        const PetriNet& net = nets[k];
        std::vector<std::string> place_ids(net.place_count());
        std::vector<std::string> transition_ids(net.transition_count());
        std::set<std::string> seen_labels;

        for (std::size_t i = 0; i < net.place_count(); ++i) {
            const Place& p = net.places()[i];
            const std::string fresh = fmt::format("{}.{}", k, p.id);
            if (p.label.empty()) {
                places.push_back({fresh, p.label, p.tokens});
                place_ids[i] = fresh;
                continue;
            }
            if (!seen_labels.insert("p:" + p.label).second) {
                throw Error(ErrorKind::FusionConflict,
                            fmt::format("operand {} has two places labelled '{}'", k, p.label));
            }
            const auto [it, inserted] = place_by_label.emplace(p.label, places.size());
            if (inserted) {
                places.push_back({fresh, p.label, p.tokens});
            } else if (places[it->second].tokens != p.tokens) {
                throw Error(ErrorKind::FusionConflict,
                            fmt::format("place label '{}' fused with conflicting tokens {} and {}", p.label,
                                        places[it->second].tokens, p.tokens));
            }
            place_ids[i] = places[it->second].id;
        }

        for (std::size_t i = 0; i < net.transition_count(); ++i) {
            const Transition& t = net.transitions()[i];
            const std::string fresh = fmt::format("{}.{}", k, t.id);
            if (t.label.empty()) {
                transitions.push_back({fresh, t.label});
                transition_ids[i] = fresh;
                continue;
            }
            if (!seen_labels.insert("t:" + t.label).second) {
                throw Error(ErrorKind::FusionConflict,
                            fmt::format("operand {} has two transitions labelled '{}'", k, t.label));
            }
            const auto [it, inserted] = transition_by_label.emplace(t.label, transitions.size());
            if (inserted) transitions.push_back({fresh, t.label});
            transition_ids[i] = transitions[it->second].id;
        }

        for (const auto& arc : net.input_arcs()) {
            inputs.emplace(place_ids[net.place_index(arc.place)],
                           transition_ids[net.transition_index(arc.transition)], arc.weight);
        }
        for (const auto& arc : net.output_arcs()) {
            outputs.emplace(transition_ids[net.transition_index(arc.transition)],
                            place_ids[net.place_index(arc.place)], arc.weight);
        }
    }

    std::vector<InputArc> in;
    for (const auto& [p, t, w] : inputs) {
        if (!in.empty() && in.back().place == p && in.back().transition == t) {
            throw Error(ErrorKind::FusionConflict, fmt::format("fused arc {} -> {} has conflicting weights", p, t));
        }
        in.push_back({p, t, w});
    }
    std::vector<OutputArc> out;
    for (const auto& [t, p, w] : outputs) {
        if (!out.empty() && out.back().transition == t && out.back().place == p) {
            throw Error(ErrorKind::FusionConflict, fmt::format("fused arc {} -> {} has conflicting weights", t, p));
        }
        out.push_back({t, p, w});
    }
    return PetriNet(std::move(places), std::move(transitions), std::move(in), std::move(out));
}

std::string serialize(const PetriNet& net) {
    std::string out;
    const auto label = [](const std::string& l) -> std::string_view { return l.empty() ? "-" : l; };
    for (const auto& p : net.places()) out += fmt::format("place {} {} {}\n", p.id, label(p.label), p.tokens);
    for (const auto& t : net.transitions()) out += fmt::format("transition {} {}\n", t.id, label(t.label));
    for (const auto& a : net.input_arcs()) out += fmt::format("in {} {} {}\n", a.place, a.transition, a.weight);
    for (const auto& a : net.output_arcs()) out += fmt::format("out {} {} {}\n", a.transition, a.place, a.weight);
    return out;
}

PetriNet parse_net(std::string_view source) {
    std::vector<Place> places;
    std::vector<Transition> transitions;
    std::vector<InputArc> inputs;
    std::vector<OutputArc> outputs;
    const auto label = [](std::string_view w) { return w == "-" ? std::string{} : std::string(w); };
    for (const auto& line : text::tokenize(source)) {
        const auto kind = line.words[0];
        if (kind == "place") {
            text::expect_arity(line, 4);
            places.push_back({std::string(line.words[1]), label(line.words[2]),
                              text::expect_int<Count>(line, 3, "token count")});
        } else if (kind == "transition") {
            text::expect_arity(line, 3);
            transitions.push_back({std::string(line.words[1]), label(line.words[2])});
        } else if (kind == "in") {
            text::expect_arity(line, 4);
            inputs.push_back({std::string(line.words[1]), std::string(line.words[2]),
                              text::expect_int<Count>(line, 3, "weight")});
        } else if (kind == "out") {
            text::expect_arity(line, 4);
            outputs.push_back({std::string(line.words[1]), std::string(line.words[2]),
                               text::expect_int<Count>(line, 3, "weight")});
        } else {
            text::fail(line.number, "unknown record '" + std::string(kind) + "'");
        }
    }
    return PetriNet(std::move(places), std::move(transitions), std::move(inputs), std::move(outputs));
}

std::string format_marking(const PetriNet& net, const Marking& m) {
    std::string out;
    for (std::size_t i = 0; i < net.place_count() && i < m.size(); ++i) {
        if (m[i] == 0) continue;
        const auto& p = net.places()[i];
        if (!out.empty()) out += ' ';
        out += fmt::format("{}={}", p.label.empty() ? p.id : p.label, m[i]);
    }
    return out.empty() ? "(empty)" : out;
}

}  // namespace wfctl::pn
