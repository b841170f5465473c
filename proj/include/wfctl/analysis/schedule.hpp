#pragma once

#include <compare>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wfctl/analysis/reachability.hpp"
#include "wfctl/pn/net.hpp"
#include "wfctl/workflow/spec.hpp"

namespace wfctl::analysis {

// One execution of a job. `occurrence` counts earlier starts of the same job
// (0 for the first), so a job of an activity with n instances occurs n times.
struct ScheduledJob {
    std::string job;
    int occurrence = 0;
    std::string activity;
    int start = 0;
    int end = 0;
    auto operator<=>(const ScheduledJob&) const = default;
};

// "J11" for the first occurrence, "J11@2" for the second, ...
std::string occurrence_name(const ScheduledJob& entry);

class Schedule {
public:
    Schedule() = default;
    // Entries are kept sorted by (job, occurrence).
    explicit Schedule(std::vector<ScheduledJob> entries);

    const std::vector<ScheduledJob>& entries() const { return entries_; }
    int makespan() const;
    std::vector<int> start_vector() const;
    const ScheduledJob* find(std::string_view job, int occurrence = 0) const;

    auto operator<=>(const Schedule&) const = default;

private:
    std::vector<ScheduledJob> entries_;
};

// Mid-run state for replanning: `marking` already reflects `running` (tokens
// in exec places, resources held) and `finished`.
struct TimedState {
    pn::Marking marking;
    int time = 0;
    std::vector<ScheduledJob> running;   // end > time
    std::vector<ScheduledJob> finished;  // end <= time
};

// Eager (non-idling) timed runs of a workflow net: time advances only when no
// start transition is enabled, end transitions fire `duration` units after
// their start, and runs stop at markings satisfying is_final. Distinct
// start/end assignments are returned in ascending order. A stuck non-final
// run throws Error{SchedulingDeadlock}.
std::vector<Schedule> enumerate_schedules(const pn::PetriNet& net, const workflow::JobTable& jobs,
                                          const MarkingPredicate& is_final);
std::vector<Schedule> enumerate_schedules_from(const pn::PetriNet& net, const workflow::JobTable& jobs,
                                               const MarkingPredicate& is_final, const TimedState& state);

using Weights = std::map<std::string, double>;

struct CostReport {
    std::map<std::string, int> completion;  // activity -> latest end
    std::map<std::string, double> cost;     // activity -> weight * completion
    double total = 0;
    int makespan = 0;
};

// Throws Error{IncompleteWeights} when an activity of s has no weight.
CostReport evaluate_schedule(const Schedule& s, const Weights& weights);

using RankedSchedule = std::pair<Schedule, CostReport>;

// Ascending by (total cost, makespan, start vector). Throws Error{EmptyInput}.
std::vector<RankedSchedule> rank_schedules(std::span<const Schedule> schedules, const Weights& weights);

// Concrete resource instances ("R1#1", "R1#2", ...) for every job occurrence.
struct Assignment {
    ScheduledJob entry;
    std::vector<std::string> instances;  // sorted
};

struct RecommendationSet {
    std::vector<Assignment> assignments;  // by (start, job, occurrence)
    std::map<std::string, std::vector<std::string>> service_order;  // instance -> occurrence names

    const Assignment* find(std::string_view job, int occurrence = 0) const;
};

std::string instance_name(std::string_view resource, int index);

// Availability of one concrete instance when assigning.
struct InstanceSlot {
    std::string id;
    int free_at = 0;
};

// Greedy first-fit by instance index over entries sorted by start time.
// Throws Error{FeasibilityViolation} when a job finds too few free instances.
RecommendationSet assign_instances(std::span<const ScheduledJob> entries, const workflow::JobTable& jobs,
                                   std::map<std::string, std::vector<InstanceSlot>> instances);
RecommendationSet derive_recommendations(const Schedule& best, const workflow::JobTable& jobs,
                                         const workflow::ResourcePool& pool);

// Text renderings: `job start end resources` table sorted by (start, job) and
// the `sched <index> <job> <start> <end>` line format.
std::string format_schedule_table(const Schedule& s, const RecommendationSet* recommendations = nullptr);
std::string format_schedule_lines(std::size_t index, const Schedule& s);
std::string format_cost(const CostReport& report);

}  // namespace wfctl::analysis
