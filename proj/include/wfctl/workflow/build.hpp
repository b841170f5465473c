#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wfctl/pn/net.hpp"
#include "wfctl/workflow/spec.hpp"

namespace wfctl::workflow {

// Place and transition names used by the translation. Names double as
// labels, so composition fuses only the resource places.
std::string pending_place(std::string_view job);
std::string exec_place(std::string_view job);
std::string wait_place(std::string_view before, std::string_view after);
std::string mutex_place(std::string_view first, std::string_view second);
std::string done_place(std::string_view activity);
std::string start_transition(std::string_view job);
std::string end_transition(std::string_view job);

// Job id when `label` is start_<job> / end_<job>, empty otherwise.
std::string_view job_of_start(std::string_view label);
std::string_view job_of_end(std::string_view label);

// Structural net of one activity: every job becomes start -> exec -> end,
// with a pending place feeding the start, waiting places for precedence,
// one-token mutex places for non-overlap, unmarked resource places and a
// done place fed by the sink jobs. Throws Error{InvalidSpec}.
pn::PetriNet activity_to_net(const WorkflowSpec& spec);

// Fused global model: resource places marked with their capacity and every
// pending place of activity A marked with counts[A].
pn::PetriNet compose_global(std::span<const WorkflowSpec> specs, const ResourcePool& pool,
                            const InstanceCounts& counts);

// True when no pending, in-execution or waiting place holds a token.
using MarkingPredicate = std::function<bool(const pn::Marking&)>;
MarkingPredicate completion_predicate(const pn::PetriNet& net);

// Places whose conservation law  tokens(r) + sum_j demand_j(r) * exec_j = capacity(r)
// fails at m, formatted for reporting. Empty when the invariant holds.
std::vector<std::string> resource_invariant_violations(const pn::PetriNet& net, const JobTable& jobs,
                                                       const ResourcePool& pool, const pn::Marking& m);

}  // namespace wfctl::workflow
