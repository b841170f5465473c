#include <algorithm>
#include <numeric>
#include <set>
#include <tuple>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "wfctl/agents/agents.hpp"
#include "wfctl/error.hpp"
#include "wfctl/workflow/build.hpp"

namespace wfctl::agents {

int Trace::debits() const {
    int sum = 0;
    for (const auto& [product, balance] : balances) sum += initial.at(product) - balance;
    return sum;
}

int Trace::credits() const {
    int sum = 0;
    for (const auto& [instance, earned] : earnings) sum += earned;
    return sum;
}

namespace {

using workflow::Job;
using workflow::NonOverlap;
using workflow::Precedence;
using workflow::WorkflowSpec;

[[noreturn]] void config_error(const std::string& message) { throw Error(ErrorKind::Config, message); }

// "R1#2" -> ("R1", 2), or nullopt when malformed.
std::optional<std::pair<std::string, int>> split_instance(const std::string& id) {
    const auto hash = id.find('#');
    if (hash == std::string::npos || hash == 0 || hash + 1 == id.size()) return std::nullopt;
    int index = 0;
    for (std::size_t i = hash + 1; i < id.size(); ++i) {
        if (id[i] < '0' || id[i] > '9' || index > 100000) return std::nullopt;
        index = index * 10 + (id[i] - '0');
    }
    return std::pair{id.substr(0, hash), index};
}

void validate(const SimulationConfig& c) {
    if (const auto d = workflow::validate_pool(c.pool); !d.empty()) config_error(workflow::format_diagnostics(d));
    std::set<std::string> activities;
    for (const auto& spec : c.specs) {
        if (const auto d = workflow::validate_spec(spec, c.pool); !d.empty()) {
            config_error(workflow::format_diagnostics(d));
        }
        if (!activities.insert(spec.activity).second) config_error("duplicate activity " + spec.activity);
        const auto n = c.counts.find(spec.activity);
        if (n == c.counts.end()) config_error("no instance count for activity " + spec.activity);
        if (n->second < 0) config_error("negative instance count for activity " + spec.activity);
    }
    for (const auto& [activity, n] : c.counts) {
        if (!activities.contains(activity)) config_error("instance count for unknown activity " + activity);
    }
    for (const auto& [activity, units] : c.budgets) {
        if (!activities.contains(activity)) config_error("budget for unknown activity " + activity);
        if (units < 0) config_error("negative budget for activity " + activity);
    }
    for (const auto& [key, units] : c.prices) {
        const auto& [type, job] = key;
        bool demanded = false;
        for (const auto& spec : c.specs) {
            if (const auto* j = spec.find_job(job)) demanded = demanded || j->demand.contains(type);
        }
        if (!demanded) config_error(fmt::format("price for {} on {}, which it does not use", job, type));
        if (units < 0) config_error(fmt::format("negative price for {} on {}", job, type));
    }
    for (const auto& b : c.breakdowns) {
        const auto parts = split_instance(b.instance);
        if (!parts) config_error("malformed resource instance " + b.instance);
        const auto cap = c.pool.capacity.find(parts->first);
        if (cap == c.pool.capacity.end() || parts->second < 1 || parts->second > cap->second) {
            config_error("unknown resource instance " + b.instance);
        }
        if (b.time < 0) config_error("breakdown before time 0");
    }
    if (c.recommendations) {
        for (const auto& a : c.recommendations->assignments) {
            const auto n = c.counts.find(a.entry.activity);
            if (n == c.counts.end() || a.entry.occurrence >= n->second) {
                config_error("recommendation for a missing product: " + analysis::occurrence_name(a.entry));
            }
        }
    }
}

struct Active {
    int start = 0;
    int end = 0;
    int price = 0;
    std::vector<std::string> agents;
    bool started = false;
};

struct ProductState {
    ProductAgent agent;
    const WorkflowSpec* spec = nullptr;
    std::set<std::string> done;
    std::map<std::string, std::string> failed;  // job -> reason
    std::map<std::string, Active> active;       // booked or running
    bool complete = false;
};

struct Recommendation {
    int start = 0;
    std::vector<std::string> instances;
};

class Engine {
public:
    explicit Engine(const SimulationConfig& c)
        : config_(c),
          jobs_(workflow::job_table(c.specs)),
          net_(workflow::compose_global(c.specs, c.pool, c.counts)),
          final_(workflow::completion_predicate(net_)),
          weights_(c.weights) {
        for (const auto& spec : c.specs) {
            weights_.try_emplace(spec.activity, 1.0);
        }
        for (const auto& [type, capacity] : c.pool.capacity) {
            for (int i = 1; i <= capacity; ++i) {
                ResourceAgent agent;
                agent.id = analysis::instance_name(type, i);
                agent.type = type;
                agent.index = i;
                for (const auto& [id, info] : jobs_) {
                    if (!info.demand.contains(type)) continue;
                    const auto price = c.prices.find({type, id});
                    agent.catalog[id] = {info.duration, price == c.prices.end() ? info.duration : price->second};
                }
                resources_.push_back(std::move(agent));
            }
        }
        for (const auto& spec : c.specs) {
            const int budget = c.budgets.contains(spec.activity) ? c.budgets.at(spec.activity) : 100;
            for (int i = 1; i <= c.counts.at(spec.activity); ++i) {
                ProductState p;
                p.agent.id = fmt::format("{}#{}", spec.activity, i);
                p.agent.activity = spec.activity;
                p.agent.instance = i;
                p.agent.budget = p.agent.balance = budget;
                p.spec = &spec;
                products_.push_back(std::move(p));
            }
        }
        std::sort(products_.begin(), products_.end(), [](const ProductState& a, const ProductState& b) {
            return std::tuple(a.agent.activity, a.agent.instance) < std::tuple(b.agent.activity, b.agent.instance);
        });
        breakdowns_ = c.breakdowns;
        std::sort(breakdowns_.begin(), breakdowns_.end(), [](const Breakdown& a, const Breakdown& b) {
            return std::tuple(a.time, a.instance) < std::tuple(b.time, b.instance);
        });
        if (c.recommendations) {
            for (const auto& a : c.recommendations->assignments) {
                auto& p = product(a.entry.activity, a.entry.occurrence + 1);
                recommend(p, a.entry.job, {a.entry.start, a.instances});
            }
        }
    }

    Trace run() {
        for (auto& p : products_) trace_.initial[p.agent.id] = p.agent.budget;
        int t = 0;
        if (!products_.empty()) {
            for (;;) {
                finish_tasks(t);
                breakdowns(t);
                start_booked(t);
                negotiate(t);
                if (std::all_of(products_.begin(), products_.end(), [](const ProductState& p) { return p.complete; })) {
                    break;
                }
                const auto next = next_time(t);
                if (!next) break;
                t = *next;
            }
        }
        close(t);
        std::sort(trace_.tasks.begin(), trace_.tasks.end(), [](const Task& a, const Task& b) {
            return std::tuple(a.start, a.product, a.job) < std::tuple(b.start, b.product, b.job);
        });
        return std::move(trace_);
    }

private:
    void emit(int t, std::string kind, std::string details) {
        trace_.events.push_back({t, std::move(kind), std::move(details)});
    }

    ProductState& product(const std::string& activity, int instance) {
        for (auto& p : products_) {
            if (p.agent.activity == activity && p.agent.instance == instance) return p;
        }
        config_error(fmt::format("no product {}#{}", activity, instance));
    }

    ResourceAgent& resource(const std::string& id) {
        for (auto& r : resources_) {
            if (r.id == id) return r;
        }
        config_error("unknown resource instance " + id);
    }

    void recommend(ProductState& p, const std::string& job, Recommendation r) {
        p.agent.partners[job] = r.instances;
        recommendations_[{p.agent.id, job}] = std::move(r);
    }

    const Recommendation* recommendation(const ProductState& p, const std::string& job) const {
        const auto it = recommendations_.find({p.agent.id, job});
        return it == recommendations_.end() ? nullptr : &it->second;
    }

    // Drops the commitment of p on `job` from every reserved instance.
    void release(ProductState& p, const std::string& job) {
        const auto& a = p.active.at(job);
        for (const auto& id : a.agents) {
            auto& bookings = resource(id).bookings;
            std::erase_if(bookings, [&](const Booking& b) { return b.product == p.agent.id && b.job == job; });
        }
        p.agent.committed -= a.price;
        p.active.erase(job);
    }

    void finish_tasks(int t) {
        for (auto& p : products_) {
            std::vector<std::string> ended;
            for (const auto& [job, a] : p.active) {
                if (a.started && a.end == t) ended.push_back(job);
            }
            for (const auto& job : ended) {
                const auto a = p.active.at(job);
                emit(t, "task-end", fmt::format("{} {} {}", p.agent.id, job, fmt::join(a.agents, ",")));
                for (const auto& id : a.agents) {
                    auto& r = resource(id);
                    const int price = r.catalog.at(job).price;
                    r.earned += price;
                    p.agent.balance -= price;
                    emit(t, "payment", fmt::format("{} -> {} {}", p.agent.id, id, price));
                }
                release(p, job);
                p.done.insert(job);
                trace_.tasks.push_back({p.agent.id, job, a.start, a.end, a.agents});
            }
            if (!p.complete && p.done.size() == p.spec->jobs.size()) {
                p.complete = true;
                trace_.completion[p.agent.id] = t;
                emit(t, "complete", p.agent.id);
            }
        }
    }

    void breakdowns(int t) {
        bool any = false;
        for (const auto& b : breakdowns_) {
            if (b.time != t) continue;
            any = true;
            auto& r = resource(b.instance);
            if (!r.broken_at) r.broken_at = t;
            emit(t, "breakdown", b.instance);
            for (auto& p : products_) {
                std::vector<std::string> hit;
                for (const auto& [job, a] : p.active) {
                    if (std::find(a.agents.begin(), a.agents.end(), b.instance) != a.agents.end()) hit.push_back(job);
                }
                for (const auto& job : hit) {
                    const auto& a = p.active.at(job);
                    if (a.started) {
                        emit(t, "task-abort", fmt::format("{} {} {}", p.agent.id, job, fmt::join(a.agents, ",")));
                    } else {
                        for (const auto& id : a.agents) emit(t, "cancel", fmt::format("{} {} {}", id, p.agent.id, job));
                    }
                    release(p, job);
                }
            }
        }
        if (!any || !config_.recommendations) return;
        // Supervisor: withdraw every pending reservation and replan.
        for (auto& p : products_) {
            std::vector<std::string> pending;
            for (const auto& [job, a] : p.active) {
                if (!a.started) pending.push_back(job);
            }
            for (const auto& job : pending) {
                for (const auto& id : p.active.at(job).agents) {
                    emit(t, "cancel", fmt::format("{} {} {}", id, p.agent.id, job));
                }
                release(p, job);
            }
        }
        replan(t);
    }

    void replan(int t) {
        recommendations_.clear();
        for (auto& p : products_) p.agent.partners.clear();

        struct Past {
            std::string job;
            std::string product;
            int start;
            int end;
            bool running;
        };
        std::vector<Past> past;
        for (const auto& task : trace_.tasks) past.push_back({task.job, task.product, task.start, task.end, false});
        for (const auto& p : products_) {
            for (const auto& [job, a] : p.active) {
                if (a.started) past.push_back({job, p.agent.id, a.start, a.end, true});
            }
        }
        std::sort(past.begin(), past.end(), [](const Past& a, const Past& b) {
            return std::tuple(a.job, a.start, a.product) < std::tuple(b.job, b.start, b.product);
        });
        analysis::TimedState state;
        state.time = t;
        std::map<std::string, int> occurrence;
        std::vector<std::tuple<int, int, std::string>> firings;  // (time, ends first, transition)
        for (const auto& e : past) {
            const analysis::ScheduledJob entry{e.job, occurrence[e.job]++, jobs_.at(e.job).activity, e.start, e.end};
            (e.running ? state.running : state.finished).push_back(entry);
            firings.emplace_back(e.start, 1, workflow::start_transition(e.job));
            if (!e.running) firings.emplace_back(e.end, 0, workflow::end_transition(e.job));
        }
        std::sort(firings.begin(), firings.end());

        pn::Marking m = net_.initial_marking();
        try {
            for (const auto& [time, order, label] : firings) {
                const auto index = net_.find_transition_by_label(label);
                if (!index) throw Error(ErrorKind::StructuralMismatch, "no transition " + label);
                m = pn::fire(net_, m, *index);
            }
            std::vector<pn::Count> counts(m.counts().begin(), m.counts().end());
            for (const auto& r : resources_) {
                if (!r.broken(t)) continue;
                auto& tokens = counts.at(*net_.find_place_by_label(r.type));
                if (tokens == 0) throw Error(ErrorKind::SchedulingDeadlock, "broken unit still held");
                --tokens;
            }
            state.marking = pn::Marking(std::move(counts));

            const auto schedules = analysis::enumerate_schedules_from(net_, jobs_, final_, state);
            const auto ranked = analysis::rank_schedules(schedules, weights_);
            const auto& best = ranked.front().first;

            std::vector<analysis::ScheduledJob> upcoming;
            for (const auto& e : best.entries()) {
                if (e.start >= t) upcoming.push_back(e);
            }
            std::map<std::string, std::vector<analysis::InstanceSlot>> slots;
            for (const auto& r : resources_) {
                if (!r.broken(t)) slots[r.type].push_back({r.id, r.available_from(t)});
            }
            const auto assigned = analysis::assign_instances(upcoming, jobs_, slots);

            // Occurrences of a job go to the products still owing it, by instance.
            std::map<std::string, std::vector<const analysis::Assignment*>> by_job;
            for (const auto& a : assigned.assignments) by_job[a.entry.job].push_back(&a);
            std::vector<std::tuple<int, std::string, std::string, std::vector<std::string>>> issued;
            for (auto& [job, list] : by_job) {
                std::sort(list.begin(), list.end(), [](const auto* a, const auto* b) {
                    return std::tuple(a->entry.start, a->entry.occurrence) < std::tuple(b->entry.start, b->entry.occurrence);
                });
                std::size_t k = 0;
                for (auto& p : products_) {
                    if (k == list.size()) break;
                    if (p.spec->activity != jobs_.at(job).activity || p.done.contains(job) || p.active.contains(job)) {
                        continue;
                    }
                    recommend(p, job, {list[k]->entry.start, list[k]->instances});
                    issued.emplace_back(list[k]->entry.start, p.agent.id, job, list[k]->instances);
                    ++k;
                }
            }
            std::sort(issued.begin(), issued.end());
            emit(t, "supervisor-action",
                 fmt::format("replan {} schedules makespan {}", schedules.size(), best.makespan()));
            for (const auto& [start, product, job, instances] : issued) {
                emit(t, "supervisor-action",
                     fmt::format("recommend {} {} {} {}", product, job, start, fmt::join(instances, ",")));
            }
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::SchedulingDeadlock && e.kind() != ErrorKind::FeasibilityViolation &&
                e.kind() != ErrorKind::NotEnabled) {
                throw;
            }
            recommendations_.clear();
            for (auto& p : products_) p.agent.partners.clear();
            emit(t, "supervisor-action", "no-plan");
        }
    }

    void begin(ProductState& p, const std::string& job, int t) {
        auto& a = p.active.at(job);
        a.started = true;
        emit(t, "task-start", fmt::format("{} {} {}", p.agent.id, job, fmt::join(a.agents, ",")));
        if (const auto* r = recommendation(p, job); r && (r->start != t || r->instances != a.agents)) {
            emit(t, "supervisor-action",
                 fmt::format("deviation {} {} start {} on {} expected {} on {}", p.agent.id, job, t,
                             fmt::join(a.agents, ","), r->start, fmt::join(r->instances, ",")));
        }
    }

    void start_booked(int t) {
        for (auto& p : products_) {
            for (auto& [job, a] : p.active) {
                if (!a.started && a.start == t) begin(p, job, t);
            }
        }
    }

    // Job is startable by p: predecessors done by p, and no job sharing a
    // non-overlap group with it is booked or running for the activity.
    bool ready(const ProductState& p, const Job& job) const {
        if (p.done.contains(job.id) || p.active.contains(job.id) || p.failed.contains(job.id)) return false;
        for (const auto& c : p.spec->constraints) {
            if (const auto* before = std::get_if<Precedence>(&c)) {
                if (before->after == job.id && !p.done.contains(before->before)) return false;
            } else {
                const auto& n = std::get<NonOverlap>(c);
                if (n.first != job.id && n.second != job.id) continue;
                for (const auto& q : products_) {
                    if (q.spec != p.spec) continue;
                    if (q.active.contains(n.first) || q.active.contains(n.second)) return false;
                }
            }
        }
        return true;
    }

    void negotiate(int t) {
        for (auto& p : products_) {
            for (const auto& job : p.spec->jobs) {
                if (!ready(p, job)) continue;
                if (const auto* r = recommendation(p, job.id); r && r->start > t) continue;
                auto result = negotiate_job(p.agent, job, resources_, t);
                for (auto& msg : result.messages) emit(t, std::move(msg.kind), std::move(msg.details));
                if (const auto* f = std::get_if<Failure>(&result.outcome)) {
                    p.failed[job.id] = f->kind == FailureKind::NoBidder ? "no-bidder" : "insufficient-funds";
                    continue;
                }
                auto& award = std::get<Award>(result.outcome);
                for (const auto& id : award.agents) {
                    auto& bookings = resource(id).bookings;
                    bookings.push_back({p.agent.id, job.id, award.start, award.end});
                    std::sort(bookings.begin(), bookings.end(),
                              [](const Booking& a, const Booking& b) { return a.start < b.start; });
                }
                p.agent.committed += award.price;
                p.active[job.id] = {award.start, award.end, award.price, award.agents, false};
                if (award.start == t) begin(p, job.id, t);
            }
        }
    }

    std::optional<int> next_time(int t) const {
        std::optional<int> next;
        const auto consider = [&](int when) {
            if (when > t && (!next || when < *next)) next = when;
        };
        for (const auto& p : products_) {
            for (const auto& [job, a] : p.active) consider(a.started ? a.end : a.start);
            for (const auto& job : p.spec->jobs) {
                if (!ready(p, job)) continue;
                if (const auto* r = recommendation(p, job.id)) consider(r->start);
            }
        }
        for (const auto& b : breakdowns_) consider(b.time);
        return next;
    }

    void close(int t) {
        trace_.end_time = t;
        for (const auto& r : resources_) trace_.earnings[r.id] = r.earned;
        if (products_.empty()) return;
        for (const auto& p : products_) {
            if (p.complete) continue;
            trace_.blocked.push_back(p.agent.id);
            std::vector<std::string> reasons;
            for (const auto& [job, why] : p.failed) reasons.push_back(job + ":" + why);
            emit(t, "blocked", fmt::format("{} {}", p.agent.id, reasons.empty() ? "stalled" : fmt::format("{}", fmt::join(reasons, " "))));
        }
        for (const auto& p : products_) {
            trace_.balances[p.agent.id] = p.agent.balance;
            emit(t, "account", fmt::format("{} balance {} paid {}", p.agent.id, p.agent.balance,
                                           p.agent.budget - p.agent.balance));
        }
        for (const auto& r : resources_) emit(t, "earned", fmt::format("{} {}", r.id, r.earned));
    }

    const SimulationConfig& config_;
    workflow::JobTable jobs_;
    pn::PetriNet net_;
    workflow::MarkingPredicate final_;
    analysis::Weights weights_;
    std::vector<ResourceAgent> resources_;
    std::vector<ProductState> products_;
    std::vector<Breakdown> breakdowns_;
    std::map<std::pair<std::string, std::string>, Recommendation> recommendations_;
    Trace trace_;
};

}  // namespace

Simulation::Simulation(SimulationConfig config) : config_(std::move(config)) { validate(config_); }

void Simulation::handle_breakdown(const std::string& instance, int time) {
    auto next = config_;
    next.breakdowns.push_back({instance, time});
    validate(next);
    config_ = std::move(next);
}

Trace Simulation::run() const { return Engine(config_).run(); }

Trace run_simulation(const SimulationConfig& config) { return Simulation(config).run(); }

}  // namespace wfctl::agents
