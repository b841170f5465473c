#include <fmt/format.h>

#include "common/text.hpp"
#include "wfctl/agents/agents.hpp"

namespace wfctl::agents {

Scenario parse_scenario(std::string_view text) {
    Scenario s;
    for (const auto& line : text::tokenize(text)) {
        const auto head = line.words[0];
        if (head == "budget") {
            text::expect_arity(line, 3);
            const std::string activity(line.words[1]);
            const int units = text::expect_int<int>(line, 2, "budget");
            if (units < 0) text::fail(line.number, "negative budget");
            if (!s.budgets.emplace(activity, units).second) text::fail(line.number, "duplicate budget for " + activity);
        } else if (head == "price") {
            text::expect_arity(line, 4);
            const std::pair key{std::string(line.words[1]), std::string(line.words[2])};
            const int units = text::expect_int<int>(line, 3, "price");
            if (units < 0) text::fail(line.number, "negative price");
            if (!s.prices.emplace(key, units).second) {
                text::fail(line.number, "duplicate price for " + key.second + " on " + key.first);
            }
        } else if (head == "breakdown") {
            text::expect_arity(line, 4);
            if (line.words[2] != "at") text::fail(line.number, "expected 'at'");
            const std::string instance(line.words[1]);
            if (instance.find('#') == std::string::npos) text::fail(line.number, "expected <type>#<index>, got " + instance);
            const int time = text::expect_int<int>(line, 3, "time");
            if (time < 0) text::fail(line.number, "negative time");
            s.breakdowns.push_back({instance, time});
        } else {
            text::fail(line.number, "unknown directive '" + std::string(head) + "'");
        }
    }
    return s;
}

std::string format_trace(const Trace& trace) {
    std::string out;
    for (const auto& e : trace.events) out += fmt::format("t={} {} {}\n", e.time, e.kind, e.details);
    return out;
}

}  // namespace wfctl::agents
