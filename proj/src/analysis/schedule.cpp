#include "wfctl/analysis/schedule.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <set>

#include <fmt/format.h>

#include "wfctl/error.hpp"
#include "wfctl/workflow/build.hpp"

namespace wfctl::analysis {

using pn::Marking;
using pn::PetriNet;

std::string occurrence_name(const ScheduledJob& entry) {
    return entry.occurrence == 0 ? entry.job : fmt::format("{}@{}", entry.job, entry.occurrence + 1);
}

Schedule::Schedule(std::vector<ScheduledJob> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(), [](const ScheduledJob& a, const ScheduledJob& b) {
        return std::tie(a.job, a.occurrence) < std::tie(b.job, b.occurrence);
    });
}

int Schedule::makespan() const {
    int m = 0;
    for (const auto& e : entries_) m = std::max(m, e.end);
    return m;
}

std::vector<int> Schedule::start_vector() const {
    std::vector<int> v;
    v.reserve(entries_.size());
    for (const auto& e : entries_) v.push_back(e.start);
    return v;
}

const ScheduledJob* Schedule::find(std::string_view job, int occurrence) const {
    for (const auto& e : entries_) {
        if (e.job == job && e.occurrence == occurrence) return &e;
    }
    return nullptr;
}

namespace {

struct Running {
    std::size_t end_transition;
    ScheduledJob entry;
};

// Depth-first search over eager runs. Starts fired within one instant are
// explored in non-decreasing transition order only: start transitions never
// feed each other, so any set of starts fireable at an instant is fireable in
// sorted order and the other interleavings give the same schedule.
class EagerExplorer {
public:
    EagerExplorer(const PetriNet& net, const workflow::JobTable& jobs, const MarkingPredicate& is_final)
        : net_(net), jobs_(jobs), is_final_(is_final), start_job_(net.transition_count()) {
        for (std::size_t t = 0; t < net.transition_count(); ++t) {
            const auto& label = net.transitions()[t].label;
            if (const auto job = workflow::job_of_start(label); !job.empty()) {
                if (!jobs.contains(std::string(job))) {
                    throw Error(ErrorKind::Config, fmt::format("no duration for job {}", job));
                }
                start_job_[t] = std::string(job);
            } else if (const auto ended = workflow::job_of_end(label); !ended.empty()) {
                end_of_job_[std::string(ended)] = t;
            } else {
                throw Error(ErrorKind::StructuralMismatch,
                            fmt::format("transition '{}' is neither a job start nor a job end", label));
            }
        }
        for (std::size_t t = 0; t < net.transition_count(); ++t) {
            if (start_job_[t] && !end_of_job_.contains(*start_job_[t])) {
                throw Error(ErrorKind::StructuralMismatch, fmt::format("job {} has no end transition", *start_job_[t]));
            }
        }
    }

    std::vector<Schedule> run(const TimedState& state) {
        std::map<std::string, int> occurrences;
        std::vector<Running> running;
        for (const auto& e : state.finished) {
            if (e.end > state.time) throw Error(ErrorKind::Config, "finished job ends after the replanning time");
            ++occurrences[e.job];
        }
        for (const auto& e : state.running) {
            if (e.end <= state.time) throw Error(ErrorKind::Config, "running job already ended at the replanning time");
            const auto end = end_of_job_.find(e.job);
            if (end == end_of_job_.end()) throw Error(ErrorKind::Config, "running job " + e.job + " is not in the net");
            running.push_back({end->second, e});
            ++occurrences[e.job];
        }
        explore(state.marking, state.time, std::move(running), state.finished, std::move(occurrences), 0);
        return {results_.begin(), results_.end()};
    }

private:
    void explore(const Marking& m, int time, std::vector<Running> running, std::vector<ScheduledJob> done,
                 std::map<std::string, int> occurrences, std::size_t min_start) {
        std::vector<std::size_t> starts;
        for (const auto t : pn::enabled_indices(net_, m)) {
            if (start_job_[t]) starts.push_back(t);
        }

        bool branched = false;
        for (const auto t : starts) {
            if (t < min_start) continue;
            branched = true;
            const std::string& job = *start_job_[t];
            const auto& info = jobs_.at(job);
            auto next_running = running;
            auto next_occurrences = occurrences;
            const int occurrence = next_occurrences[job]++;
            next_running.push_back({end_of_job_.at(job), {job, occurrence, info.activity, time, time + info.duration}});
            explore(pn::fire(net_, m, t), time, std::move(next_running), done, std::move(next_occurrences), t);
        }
        if (branched || !starts.empty()) return;

        if (running.empty()) {
            if (!is_final_(m)) {
                throw Error(ErrorKind::SchedulingDeadlock,
                            fmt::format("eager run stuck at t={} in non-final marking {}", time, pn::format_marking(net_, m)));
            }
            results_.insert(Schedule(std::move(done)));
            return;
        }

        int next_time = std::numeric_limits<int>::max();
        for (const auto& r : running) next_time = std::min(next_time, r.entry.end);
        std::sort(running.begin(), running.end(), [](const Running& a, const Running& b) {
            return std::tie(a.entry.end, a.end_transition, a.entry.occurrence) <
                   std::tie(b.entry.end, b.end_transition, b.entry.occurrence);
        });
        Marking next = m;
        std::vector<Running> still_running;
        for (auto& r : running) {
            if (r.entry.end == next_time) {
                next = pn::fire(net_, next, r.end_transition);
                done.push_back(std::move(r.entry));
            } else {
                still_running.push_back(std::move(r));
            }
        }
        explore(next, next_time, std::move(still_running), std::move(done), std::move(occurrences), 0);
    }

    const PetriNet& net_;
    const workflow::JobTable& jobs_;
    const MarkingPredicate& is_final_;
    std::vector<std::optional<std::string>> start_job_;
    std::map<std::string, std::size_t> end_of_job_;
    std::set<Schedule> results_;
};

}  // namespace

std::vector<Schedule> enumerate_schedules(const PetriNet& net, const workflow::JobTable& jobs,
                                          const MarkingPredicate& is_final) {
    return enumerate_schedules_from(net, jobs, is_final, TimedState{net.initial_marking(), 0, {}, {}});
}

std::vector<Schedule> enumerate_schedules_from(const PetriNet& net, const workflow::JobTable& jobs,
                                               const MarkingPredicate& is_final, const TimedState& state) {
    return EagerExplorer(net, jobs, is_final).run(state);
}

CostReport evaluate_schedule(const Schedule& s, const Weights& weights) {
    CostReport report;
    for (const auto& e : s.entries()) {
        auto [it, inserted] = report.completion.try_emplace(e.activity, e.end);
        if (!inserted) it->second = std::max(it->second, e.end);
    }
    for (const auto& [activity, completion] : report.completion) {
        const auto w = weights.find(activity);
        if (w == weights.end()) throw Error(ErrorKind::IncompleteWeights, "no weight for activity " + activity);
        if (!(w->second >= 0)) throw Error(ErrorKind::IncompleteWeights, "negative weight for activity " + activity);
        report.cost[activity] = w->second * completion;
        report.total += report.cost[activity];
    }
    report.makespan = s.makespan();
    return report;
}

std::vector<RankedSchedule> rank_schedules(std::span<const Schedule> schedules, const Weights& weights) {
    if (schedules.empty()) throw Error(ErrorKind::EmptyInput, "no schedules to rank");
    std::vector<RankedSchedule> ranked;
    ranked.reserve(schedules.size());
    for (const auto& s : schedules) ranked.emplace_back(s, evaluate_schedule(s, weights));
    std::stable_sort(ranked.begin(), ranked.end(), [](const RankedSchedule& a, const RankedSchedule& b) {
        if (a.second.total != b.second.total) return a.second.total < b.second.total;
        if (a.second.makespan != b.second.makespan) return a.second.makespan < b.second.makespan;
        return a.first.start_vector() < b.first.start_vector();
    });
    return ranked;
}

const Assignment* RecommendationSet::find(std::string_view job, int occurrence) const {
    for (const auto& a : assignments) {
        if (a.entry.job == job && a.entry.occurrence == occurrence) return &a;
    }
    return nullptr;
}

std::string instance_name(std::string_view resource, int index) { return fmt::format("{}#{}", resource, index); }

RecommendationSet assign_instances(std::span<const ScheduledJob> entries, const workflow::JobTable& jobs,
                                   std::map<std::string, std::vector<InstanceSlot>> instances) {
    std::vector<ScheduledJob> order(entries.begin(), entries.end());
    std::sort(order.begin(), order.end(), [](const ScheduledJob& a, const ScheduledJob& b) {
        return std::tie(a.start, a.job, a.occurrence) < std::tie(b.start, b.job, b.occurrence);
    });

    RecommendationSet out;
    for (const auto& entry : order) {
        const auto info = jobs.find(entry.job);
        if (info == jobs.end()) throw Error(ErrorKind::Config, "unknown job " + entry.job);
        Assignment assignment{entry, {}};
        for (const auto& [res, units] : info->second.demand) {
            auto slots = instances.find(res);
            int taken = 0;
            if (slots != instances.end()) {
                for (auto& slot : slots->second) {
                    if (taken == units) break;
                    if (slot.free_at > entry.start) continue;
                    slot.free_at = entry.end;
                    assignment.instances.push_back(slot.id);
                    out.service_order[slot.id].push_back(occurrence_name(entry));
                    ++taken;
                }
            }
            if (taken < units) {
                throw Error(ErrorKind::FeasibilityViolation,
                            fmt::format("{} needs {} x {} at t={} but only {} instance(s) are free",
                                        occurrence_name(entry), units, res, entry.start, taken));
            }
        }
        std::sort(assignment.instances.begin(), assignment.instances.end());
        out.assignments.push_back(std::move(assignment));
    }
    return out;
}

RecommendationSet derive_recommendations(const Schedule& best, const workflow::JobTable& jobs,
                                         const workflow::ResourcePool& pool) {
    std::map<std::string, std::vector<InstanceSlot>> instances;
    for (const auto& [res, cap] : pool.capacity) {
        for (int i = 1; i <= cap; ++i) instances[res].push_back({instance_name(res, i), 0});
    }
    return assign_instances(best.entries(), jobs, std::move(instances));
}

std::string format_schedule_table(const Schedule& s, const RecommendationSet* recommendations) {
    std::vector<ScheduledJob> order = s.entries();
    std::sort(order.begin(), order.end(), [](const ScheduledJob& a, const ScheduledJob& b) {
        return std::tie(a.start, a.job, a.occurrence) < std::tie(b.start, b.job, b.occurrence);
    });
    std::string out = fmt::format("{:<10} {:>5} {:>5} {}\n", "job", "start", "end", "resources");
    for (const auto& e : order) {
        std::string resources = "-";
        if (recommendations) {
            if (const auto* a = recommendations->find(e.job, e.occurrence)) {
                resources.clear();
                for (const auto& id : a->instances) resources += (resources.empty() ? "" : ",") + id;
            }
        }
        out += fmt::format("{:<10} {:>5} {:>5} {}\n", occurrence_name(e), e.start, e.end, resources);
    }
    return out;
}

std::string format_schedule_lines(std::size_t index, const Schedule& s) {
    std::vector<ScheduledJob> order = s.entries();
    std::sort(order.begin(), order.end(), [](const ScheduledJob& a, const ScheduledJob& b) {
        return std::tie(a.start, a.job, a.occurrence) < std::tie(b.start, b.job, b.occurrence);
    });
    std::string out;
    for (const auto& e : order) out += fmt::format("sched {} {} {} {}\n", index, occurrence_name(e), e.start, e.end);
    return out;
}

std::string format_cost(const CostReport& report) {
    std::string out = fmt::format("total {:g} makespan {}", report.total, report.makespan);
    for (const auto& [activity, completion] : report.completion) {
        out += fmt::format(" {}:{}/{:g}", activity, completion, report.cost.at(activity));
    }
    return out;
}

}  // namespace wfctl::analysis
