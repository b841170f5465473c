#include <algorithm>
#include <tuple>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "wfctl/agents/agents.hpp"

namespace wfctl::agents {

int ResourceAgent::available_from(int now) const {
    int t = now;
    for (const auto& b : bookings) t = std::max(t, b.end);
    return t;
}

NegotiationResult negotiate_job(const ProductAgent& product, const workflow::Job& job,
                                std::span<const ResourceAgent> resources, int now) {
    NegotiationResult result{Failure{FailureKind::NoBidder, {}}, {}};
    auto& out = result.messages;
    const auto partners_it = product.partners.find(job.id);
    const auto recommended = [&](const std::string& agent) {
        if (partners_it == product.partners.end()) return false;
        const auto& p = partners_it->second;
        return std::find(p.begin(), p.end(), agent) != p.end();
    };

    std::vector<std::vector<Proposal>> chosen;
    for (const auto& [type, units] : job.demand) {
        out.push_back({"cfp", fmt::format("{} {} {} x{}", product.id, job.id, type, units)});
        std::vector<Proposal> bids;
        for (const auto& agent : resources) {
            if (agent.type != type || agent.broken(now)) continue;
            const auto offer = agent.catalog.find(job.id);
            if (offer == agent.catalog.end()) continue;
            const int start = agent.available_from(now);
            bids.push_back({agent.id, start, offer->second.price, start + offer->second.duration});
            out.push_back({"proposal", fmt::format("{} -> {} {} start {} price {}", agent.id, product.id, job.id,
                                                   start, offer->second.price)});
        }
        if (static_cast<int>(bids.size()) < units) {
            // Nothing is reserved yet beyond earlier types; release those.
            for (const auto& held : chosen) {
                for (const auto& p : held) out.push_back({"cancel", fmt::format("{} {} {}", p.agent, product.id, job.id)});
            }
            out.push_back({"failure", fmt::format("{} {} no-bidder {}", product.id, job.id, type)});
            result.outcome = Failure{FailureKind::NoBidder, type};
            return result;
        }
        std::sort(bids.begin(), bids.end(), [&](const Proposal& a, const Proposal& b) {
            return std::tuple(!recommended(a.agent), a.finish, a.price, a.agent) <
                   std::tuple(!recommended(b.agent), b.finish, b.price, b.agent);
        });
        bids.resize(units);
        chosen.push_back(std::move(bids));
    }

    Award award;
    award.start = now;
    for (const auto& held : chosen) {
        for (const auto& p : held) {
            award.start = std::max(award.start, p.start);
            award.price += p.price;
            award.agents.push_back(p.agent);
        }
    }
    std::sort(award.agents.begin(), award.agents.end());
    award.end = award.start + job.duration;
    for (const auto& agent : award.agents) {
        out.push_back({"reserve", fmt::format("{} {} {} at {}", agent, product.id, job.id, award.start)});
    }
    if (award.price > product.balance - product.committed) {
        for (const auto& agent : award.agents) out.push_back({"cancel", fmt::format("{} {} {}", agent, product.id, job.id)});
        out.push_back({"failure", fmt::format("{} {} insufficient-funds {}", product.id, job.id, award.price)});
        result.outcome = Failure{FailureKind::InsufficientFunds, {}};
        return result;
    }
    for (const auto& agent : award.agents) {
        out.push_back({"confirm", fmt::format("{} {} {} at {}", agent, product.id, job.id, award.start)});
    }
    out.push_back({"award", fmt::format("{} {} {} {} {}", product.id, job.id, award.start, award.end,
                                        fmt::join(award.agents, ","))});
    result.outcome = std::move(award);
    return result;
}

}  // namespace wfctl::agents
