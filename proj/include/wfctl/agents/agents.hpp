#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wfctl/analysis/schedule.hpp"
#include "wfctl/workflow/spec.hpp"

namespace wfctl::agents {

struct CatalogEntry {
    int duration = 1;
    int price = 1;
};

// One commitment of a resource instance, [start, end).
struct Booking {
    std::string product;
    std::string job;
    int start = 0;
    int end = 0;
};

struct ResourceAgent {
    std::string id;  // "R1#1"
    std::string type;
    int index = 1;
    std::map<std::string, CatalogEntry> catalog;  // job -> offer
    std::vector<Booking> bookings;                // ascending, non-overlapping
    std::optional<int> broken_at;
    int earned = 0;

    bool broken(int now) const { return broken_at && *broken_at <= now; }
    // First instant >= now after every commitment.
    int available_from(int now) const;
};

struct ProductAgent {
    std::string id;  // "A1#1"
    std::string activity;
    int instance = 1;
    int budget = 100;
    int balance = 100;
    int committed = 0;  // prices of awarded, unpaid tasks
    std::map<std::string, std::vector<std::string>> partners;  // job -> recommended instances
};

struct Proposal {
    std::string agent;
    int start = 0;
    int price = 0;
    int finish = 0;
};

struct Award {
    int start = 0;
    int end = 0;
    int price = 0;                    // summed over the reserved instances
    std::vector<std::string> agents;  // sorted
};

enum class FailureKind { NoBidder, InsufficientFunds };

struct Failure {
    FailureKind kind;
    std::string resource;  // type without bidders, empty for funds
};

// Messages exchanged during one negotiation, in order.
struct Message {
    std::string kind;
    std::string details;
};

struct NegotiationResult {
    std::variant<Award, Failure> outcome;
    std::vector<Message> messages;
};

// Contract-net round for one job: a call for proposals per demanded type,
// proposals from every capable, non-broken agent, then an atomic reservation
// of `units` agents per type at their common earliest start. Recommended
// partners are preferred, then earliest finish, lowest price, lowest id.
// Agents are not modified; the caller books the award.
NegotiationResult negotiate_job(const ProductAgent& product, const workflow::Job& job,
                                std::span<const ResourceAgent> resources, int now);

struct Breakdown {
    std::string instance;  // "R1#1"
    int time = 0;
};

struct SimulationConfig {
    std::vector<workflow::WorkflowSpec> specs;
    workflow::ResourcePool pool;
    workflow::InstanceCounts counts;
    std::map<std::string, int> budgets;                            // activity -> units, default 100
    std::map<std::pair<std::string, std::string>, int> prices;     // (type, job) -> units, default duration
    std::optional<analysis::RecommendationSet> recommendations;    // occurrence k goes to instance k+1
    std::vector<Breakdown> breakdowns;
    analysis::Weights weights;                                     // for replanning, default 1
};

struct Event {
    int time = 0;
    std::string kind;
    std::string details;
    bool operator==(const Event&) const = default;
};

struct Task {
    std::string product;
    std::string job;
    int start = 0;
    int end = 0;
    std::vector<std::string> instances;
    bool operator==(const Task&) const = default;
};

struct Trace {
    std::vector<Event> events;
    std::vector<Task> tasks;                  // completed, by (start, product, job)
    std::map<std::string, int> initial;       // product -> budget
    std::map<std::string, int> balances;      // product -> final balance
    std::map<std::string, int> earnings;      // instance -> earned
    std::map<std::string, int> completion;    // completed product -> time
    std::vector<std::string> blocked;         // products that could not finish
    int end_time = 0;

    int debits() const;
    int credits() const;
};

class Simulation {
public:
    // Throws Error{Config} for inconsistent inputs.
    explicit Simulation(SimulationConfig config);

    // The instance stops bidding from `time`; a task running on it then is
    // aborted unpaid and the supervisor replans on the degraded model.
    void handle_breakdown(const std::string& instance, int time);

    Trace run() const;

private:
    SimulationConfig config_;
};

Trace run_simulation(const SimulationConfig& config);

// Scenario files: `budget <activity> <units>`, `price <type> <job> <units>`,
// `breakdown <type>#<index> at <t>`.
struct Scenario {
    std::map<std::string, int> budgets;
    std::map<std::pair<std::string, std::string>, int> prices;
    std::vector<Breakdown> breakdowns;
};

Scenario parse_scenario(std::string_view text);
std::string format_trace(const Trace& trace);

}  // namespace wfctl::agents
