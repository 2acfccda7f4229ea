#include "recfeed/metrics.hpp"

#include "recfeed/error.hpp"

#include <algorithm>
#include <cmath>

namespace recfeed {

namespace {

void require_n(std::size_t n)
{
    if (n == 0)
        throw PreconditionError("metric cutoff N must be at least 1");
}

std::optional<std::size_t> rank_in(const std::vector<std::string>& ranking, const std::string& target, std::size_t n)
{
    auto limit = std::min(n, ranking.size());
    for (std::size_t i = 0; i < limit; ++i) {
        if (ranking[i] == target)
            return i + 1;
    }
    return std::nullopt;
}

} // namespace

double recall_at(const std::vector<std::string>& ranking, const std::string& target, std::size_t n)
{
    require_n(n);
    return rank_in(ranking, target, n) ? 1.0 : 0.0;
}

double ndcg_at(const std::vector<std::string>& ranking, const std::string& target, std::size_t n)
{
    require_n(n);
    auto r = rank_in(ranking, target, n);
    return r ? 1.0 / std::log2(static_cast<double>(*r) + 1.0) : 0.0;
}

std::optional<double> csr_at(const std::vector<std::string>& ranking, const Item& target, std::size_t n,
                             const Catalog& catalog, const std::vector<std::string>& keys)
{
    require_n(n);
    std::vector<std::pair<std::string, AttributeValue>> wanted;
    for (const auto& key : keys) {
        const auto* values = target.find(key);
        if (!values)
            continue;
        for (const auto& v : *values) {
            bool dup = std::any_of(wanted.begin(), wanted.end(),
                                   [&](const auto& w) { return w.first == key && w.second.same_value(v); });
            if (!dup)
                wanted.emplace_back(key, v);
        }
    }
    if (wanted.empty())
        return std::nullopt;

    auto limit = std::min(n, ranking.size());
    if (limit == 0)
        return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < limit; ++i) {
        const Item* item = catalog.find(ranking[i]);
        if (!item)
            throw PreconditionError("ranking item '" + ranking[i] + "' not in catalog");
        std::size_t shared = 0;
        for (const auto& [key, v] : wanted) {
            const auto* values = item->find(key);
            if (values && std::any_of(values->begin(), values->end(),
                                      [&](const AttributeValue& x) { return x.same_value(v); }))
                ++shared;
        }
        total += static_cast<double>(shared) / static_cast<double>(wanted.size());
    }
    return total / static_cast<double>(limit);
}

double pass_rate(const std::vector<SessionOutcome>& sessions)
{
    if (sessions.empty())
        throw PreconditionError("pass rate of an empty session set");
    auto passed = std::count_if(sessions.begin(), sessions.end(), [](const SessionOutcome& s) { return s.passed; });
    return static_cast<double>(passed) / static_cast<double>(sessions.size());
}

double avg_rounds(const std::vector<SessionOutcome>& sessions, int t_max)
{
    if (sessions.empty())
        throw PreconditionError("average rounds of an empty session set");
    double total = 0.0;
    for (const auto& s : sessions)
        total += s.passed ? s.success_round : t_max + 1;
    return total / static_cast<double>(sessions.size());
}

} // namespace recfeed
