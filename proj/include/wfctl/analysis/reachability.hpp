#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "wfctl/pn/net.hpp"

namespace wfctl::analysis {

using MarkingPredicate = std::function<bool(const pn::Marking&)>;

struct Edge {
    std::size_t source;
    std::size_t transition;  // index into PetriNet::transitions()
    std::size_t target;
    auto operator<=>(const Edge&) const = default;
};

// Explored state space. Nodes are distinct markings in canonical order;
// edges are sorted by (source, transition, target).
class ReachabilityGraph {
public:
    ReachabilityGraph() = default;
    // Canonicalizes the given graph: sorts nodes, remaps and sorts edges.
    // Throws StructuralMismatch on duplicate nodes or dangling indices.
    ReachabilityGraph(std::vector<pn::Marking> nodes, std::vector<Edge> edges, std::size_t root);

    const std::vector<pn::Marking>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    std::size_t root() const { return root_; }
    std::size_t size() const { return nodes_.size(); }

    std::span<const Edge> out_edges(std::size_t node) const;
    std::optional<std::size_t> find(const pn::Marking& m) const;

private:
    std::vector<pn::Marking> nodes_;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_;  // out_edges(n) = edges_[offsets_[n], offsets_[n+1])
    std::size_t root_ = 0;
};

// Breadth-first exploration from the initial marking. Throws
// Error{CapacityExceeded} (detail = nodes discovered) when more than node_cap
// markings are found, and Error{UnboundedNet} when a new marking strictly
// covers one of its ancestors.
ReachabilityGraph reachability(const pn::PetriNet& net, std::size_t node_cap);

// Sinks that are not final, in node order.
std::vector<pn::Marking> find_deadlocks(const ReachabilityGraph& g, const MarkingPredicate& is_final);

std::vector<pn::Marking> check_forbidden(const ReachabilityGraph& g, const MarkingPredicate& forbidden);

}  // namespace wfctl::analysis
