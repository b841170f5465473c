#pragma once

#include <functional>
#include <vector>

#include "wfctl/analysis/reachability.hpp"

namespace wfctl::analysis {

using TransitionPredicate = std::function<bool(std::size_t transition)>;

// Allowed transitions per marking. Entries are sorted by marking and cover
// exactly the states the supervised system can reach.
class SupervisorPolicy {
public:
    struct Entry {
        pn::Marking marking;
        std::vector<std::size_t> allowed;  // ascending transition indices
    };

    SupervisorPolicy() = default;
    explicit SupervisorPolicy(std::vector<Entry> entries);

    const std::vector<Entry>& entries() const { return entries_; }
    // nullptr when m is outside the policy's domain.
    const std::vector<std::size_t>* allowed(const pn::Marking& m) const;
    std::size_t allowed_edge_count() const;

private:
    std::vector<Entry> entries_;
};

// Maximally permissive supervisor: drops forbidden states, then iterates a
// trim fixpoint removing states that cannot reach a final state (and, when
// `uncontrollable` is given, states with an uncontrollable edge leaving the
// surviving set). Throws Error{NoSupervisor} if the root is removed.
SupervisorPolicy synthesize_supervisor(const ReachabilityGraph& g, const MarkingPredicate& is_final,
                                       const MarkingPredicate& forbidden,
                                       const TransitionPredicate& uncontrollable = {});

}  // namespace wfctl::analysis
