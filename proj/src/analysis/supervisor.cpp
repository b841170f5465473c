#include "wfctl/analysis/supervisor.hpp"

#include <algorithm>
#include <deque>

#include "wfctl/error.hpp"

namespace wfctl::analysis {

SupervisorPolicy::SupervisorPolicy(std::vector<Entry> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) { return a.marking < b.marking; });
}

const std::vector<std::size_t>* SupervisorPolicy::allowed(const pn::Marking& m) const {
    const auto it = std::lower_bound(entries_.begin(), entries_.end(), m,
                                     [](const Entry& e, const pn::Marking& key) { return e.marking < key; });
    if (it == entries_.end() || it->marking != m) return nullptr;
    return &it->allowed;
}

std::size_t SupervisorPolicy::allowed_edge_count() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.allowed.size();
    return n;
}

SupervisorPolicy synthesize_supervisor(const ReachabilityGraph& g, const MarkingPredicate& is_final,
                                       const MarkingPredicate& forbidden, const TransitionPredicate& uncontrollable) {
    const std::size_t n = g.size();
    std::vector<bool> alive(n);
    std::vector<bool> final_state(n);
    for (std::size_t i = 0; i < n; ++i) {
        alive[i] = !forbidden(g.nodes()[i]);
        final_state[i] = is_final(g.nodes()[i]);
    }

    std::vector<std::vector<std::size_t>> predecessors(n);
    for (const auto& e : g.edges()) predecessors[e.target].push_back(e.source);

    for (bool changed = true; changed;) {
        changed = false;

        // Co-reachability of a final state inside the surviving set.
        std::vector<bool> coreach(n, false);
        std::deque<std::size_t> queue;
        for (std::size_t i = 0; i < n; ++i) {
            if (alive[i] && final_state[i]) {
                coreach[i] = true;
                queue.push_back(i);
            }
        }
        while (!queue.empty()) {
            const std::size_t v = queue.front();
            queue.pop_front();
            for (const auto u : predecessors[v]) {
                if (alive[u] && !coreach[u]) {
                    coreach[u] = true;
                    queue.push_back(u);
                }
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (alive[i] && !coreach[i]) {
                alive[i] = false;
                changed = true;
            }
        }

        if (uncontrollable) {
            for (std::size_t i = 0; i < n; ++i) {
                if (!alive[i]) continue;
                for (const auto& e : g.out_edges(i)) {
                    if (!alive[e.target] && uncontrollable(e.transition)) {
                        alive[i] = false;
                        changed = true;
                        break;
                    }
                }
            }
        }
    }

    if (!alive[g.root()]) {
        throw Error(ErrorKind::NoSupervisor, "no supervisor exists: the initial marking cannot be kept safe and live");
    }

    // Domain: states reachable from the root under the policy.
    std::vector<bool> visited(n, false);
    std::deque<std::size_t> queue{g.root()};
    visited[g.root()] = true;
    std::vector<SupervisorPolicy::Entry> entries;
    while (!queue.empty()) {
        const std::size_t u = queue.front();
        queue.pop_front();
        SupervisorPolicy::Entry entry{g.nodes()[u], {}};
        for (const auto& e : g.out_edges(u)) {
            if (!alive[e.target]) continue;
            if (entry.allowed.empty() || entry.allowed.back() != e.transition) entry.allowed.push_back(e.transition);
            if (!visited[e.target]) {
                visited[e.target] = true;
                queue.push_back(e.target);
            }
        }
        entries.push_back(std::move(entry));
    }
    return SupervisorPolicy(std::move(entries));
}

}  // namespace wfctl::analysis
