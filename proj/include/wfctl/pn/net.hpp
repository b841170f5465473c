#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wfctl/pn/kernels.hpp"

namespace wfctl::pn {

using Count = kernels::Count;

struct Place {
    std::string id;
    std::string label;  // fusion key; empty = never fused
    Count tokens = 0;
    bool operator==(const Place&) const = default;
};

struct Transition {
    std::string id;
    std::string label;
    bool operator==(const Transition&) const = default;
};

struct InputArc {
    std::string place;
    std::string transition;
    Count weight = 1;
    bool operator==(const InputArc&) const = default;
};

struct OutputArc {
    std::string transition;
    std::string place;
    Count weight = 1;
    bool operator==(const OutputArc&) const = default;
};

// Token counts indexed like PetriNet::places(), i.e. ordered by place id.
// The default ordering is the canonical marking order.
class Marking {
public:
    Marking() = default;
    explicit Marking(std::vector<Count> counts) : counts_(std::move(counts)) {}

    std::span<const Count> counts() const& { return counts_; }
    // Temporaries hand over their storage instead of a dangling view.
    std::vector<Count> counts() && { return std::move(counts_); }
    std::size_t size() const { return counts_.size(); }
    Count operator[](std::size_t i) const { return counts_[i]; }

    auto operator<=>(const Marking&) const = default;
    bool operator==(const Marking&) const = default;

private:
    std::vector<Count> counts_;
};

struct MarkingHash {
    std::size_t operator()(const Marking& m) const noexcept;
};

// Place/transition net with weighted arcs. Places, transitions and arcs are
// kept sorted by id so that equal nets serialize identically. Construction
// validates ids, labels, endpoints and weights and throws
// Error{StructuralMismatch} on violation.
class PetriNet {
public:
    PetriNet() = default;
    PetriNet(std::vector<Place> places, std::vector<Transition> transitions,
             std::vector<InputArc> inputs, std::vector<OutputArc> outputs);

    const std::vector<Place>& places() const { return places_; }
    const std::vector<Transition>& transitions() const { return transitions_; }
    const std::vector<InputArc>& input_arcs() const { return inputs_; }
    const std::vector<OutputArc>& output_arcs() const { return outputs_; }

    std::size_t place_count() const { return places_.size(); }
    std::size_t transition_count() const { return transitions_.size(); }

    std::optional<std::size_t> find_place(std::string_view id) const;
    std::optional<std::size_t> find_transition(std::string_view id) const;
    std::optional<std::size_t> find_place_by_label(std::string_view label) const;
    std::optional<std::size_t> find_transition_by_label(std::string_view label) const;
    std::size_t place_index(std::string_view id) const;
    std::size_t transition_index(std::string_view id) const;

    Marking initial_marking() const;
    // Missing places count 0; unknown ids throw StructuralMismatch.
    Marking marking_from(const std::map<std::string, Count>& by_id) const;
    // Copy of this net with its initial tokens replaced.
    PetriNet with_initial_marking(const Marking& m) const;

    // Dense rows over places for transition index t.
    std::span<const Count> pre(std::size_t t) const;
    std::span<const Count> delta(std::size_t t) const;

    bool operator==(const PetriNet& other) const {
        return places_ == other.places_ && transitions_ == other.transitions_ &&
               inputs_ == other.inputs_ && outputs_ == other.outputs_;
    }

private:
    void check_marking(const Marking& m) const;

    std::vector<Place> places_;
    std::vector<Transition> transitions_;
    std::vector<InputArc> inputs_;
    std::vector<OutputArc> outputs_;
    std::vector<Count> pre_;    // transitions x places
    std::vector<Count> delta_;  // transitions x places

    friend std::vector<std::size_t> enabled_indices(const PetriNet&, const Marking&);
    friend Marking fire(const PetriNet&, const Marking&, std::size_t);
};

// Transitions enabled at m, ascending by id. Throws StructuralMismatch when m
// does not cover exactly the net's places.
std::vector<std::size_t> enabled_indices(const PetriNet& net, const Marking& m);
std::vector<std::string> enabled_transitions(const PetriNet& net, const Marking& m);

// Pure firing rule. Throws NotEnabled / StructuralMismatch.
Marking fire(const PetriNet& net, const Marking& m, std::size_t t);
Marking fire(const PetriNet& net, const Marking& m, std::string_view transition_id);

// Disjoint union followed by fusion of equally labelled places and of equally
// labelled transitions. Result ids are "<operand>.<original id>", a fused node
// taking the id of its first occurrence. Fused places must agree on tokens
// (FusionConflict); labels must be unique inside each operand.
PetriNet fuse_compose(std::span<const PetriNet> nets);

// Line format: place/transition/in/out records, each group sorted by id.
// Empty labels are written as "-".
std::string serialize(const PetriNet& net);
PetriNet parse_net(std::string_view text);

// "label=count" for every marked place, in place order (id when unlabelled).
std::string format_marking(const PetriNet& net, const Marking& m);

}  // namespace wfctl::pn
