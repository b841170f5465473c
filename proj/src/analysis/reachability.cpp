#include "wfctl/analysis/reachability.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include <fmt/format.h>

#include "wfctl/error.hpp"

namespace wfctl::analysis {

using pn::Marking;

ReachabilityGraph::ReachabilityGraph(std::vector<Marking> nodes, std::vector<Edge> edges, std::size_t root) {
    const std::size_t n = nodes.size();
    if (root >= n) throw Error(ErrorKind::StructuralMismatch, "root index out of range");
    for (const auto& e : edges) {
        if (e.source >= n || e.target >= n) throw Error(ErrorKind::StructuralMismatch, "edge endpoint out of range");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return nodes[a] < nodes[b]; });
    std::vector<std::size_t> rank(n);
    for (std::size_t i = 0; i < n; ++i) rank[order[i]] = i;

    nodes_.reserve(n);
    for (const auto i : order) {
        if (!nodes_.empty() && nodes_.back() == nodes[i]) throw Error(ErrorKind::StructuralMismatch, "duplicate node");
        nodes_.push_back(std::move(nodes[i]));
    }
    for (auto& e : edges) e = {rank[e.source], e.transition, rank[e.target]};
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);
    root_ = rank[root];

    offsets_.assign(n + 1, 0);
    for (const auto& e : edges_) ++offsets_[e.source + 1];
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
}

std::span<const Edge> ReachabilityGraph::out_edges(std::size_t node) const {
    return std::span<const Edge>(edges_).subspan(offsets_[node], offsets_[node + 1] - offsets_[node]);
}

std::optional<std::size_t> ReachabilityGraph::find(const Marking& m) const {
    const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), m);
    if (it == nodes_.end() || *it != m) return std::nullopt;
    return static_cast<std::size_t>(it - nodes_.begin());
}

ReachabilityGraph reachability(const pn::PetriNet& net, std::size_t node_cap) {
    if (node_cap < 1) throw Error(ErrorKind::Config, "node cap must be >= 1");

    std::vector<Marking> nodes{net.initial_marking()};
    std::vector<std::size_t> parent{0};
    std::unordered_map<Marking, std::size_t, pn::MarkingHash> index{{nodes[0], 0}};
    std::vector<Edge> edges;
    const auto& k = pn::kernels::active();

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (const std::size_t t : pn::enabled_indices(net, nodes[i])) {
            Marking next = pn::fire(net, nodes[i], t);
            auto [it, inserted] = index.try_emplace(next, nodes.size());
            if (inserted) {
                if (nodes.size() + 1 > node_cap) {
                    throw Error(ErrorKind::CapacityExceeded,
                                fmt::format("reachability exceeded node cap {} ({} markings found)", node_cap,
                                            nodes.size() + 1),
                                static_cast<std::int64_t>(nodes.size() + 1));
                }
                // An ancestor strictly covered by the new marking means the
                // covering path can be repeated forever.
                for (std::size_t a = i;; a = parent[a]) {
                    if (k.strictly_covers(next.counts().data(), nodes[a].counts().data(), next.size())) {
                        throw Error(ErrorKind::UnboundedNet,
                                    fmt::format("net is unbounded: {} strictly covers an ancestor marking",
                                                pn::format_marking(net, next)));
                    }
                    if (a == 0) break;
                }
                nodes.push_back(std::move(next));
                parent.push_back(i);
            }
            edges.push_back({i, t, it->second});
        }
    }
    return ReachabilityGraph(std::move(nodes), std::move(edges), 0);
}

std::vector<Marking> find_deadlocks(const ReachabilityGraph& g, const MarkingPredicate& is_final) {
    std::vector<Marking> out;
    for (std::size_t n = 0; n < g.size(); ++n) {
        if (g.out_edges(n).empty() && !is_final(g.nodes()[n])) out.push_back(g.nodes()[n]);
    }
    return out;
}

std::vector<Marking> check_forbidden(const ReachabilityGraph& g, const MarkingPredicate& forbidden) {
    std::vector<Marking> out;
    for (const auto& m : g.nodes()) {
        if (forbidden(m)) out.push_back(m);
    }
    return out;
}

}  // namespace wfctl::analysis
