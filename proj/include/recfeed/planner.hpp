#pragma once

#include "recfeed/feed.hpp"
#include "recfeed/preference.hpp"
#include "recfeed/tools.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace recfeed {

struct Stage {
    std::vector<std::string> tools;
    std::string rationale;

    bool operator==(const Stage&) const = default;
};

/**
 * Ordered stage groups; tools within a stage run concurrently.
 */
struct ToolChain {
    std::vector<Stage> stages;

    bool contains(const std::string& tool) const;
    // Tool names per stage, e.g. [[Filter],[Matcher,Attenuator],[Aggregator]].
    std::vector<std::vector<std::string>> shape() const;
    // Empty when the chain satisfies the ordering invariants.
    std::vector<std::string> validate() const;

    bool operator==(const ToolChain&) const = default;
};

struct PlanTrace {
    ToolChain chain;
    std::vector<double> stage_ms;
    std::size_t pool_before = 0;
    std::size_t pool_after = 0;
    // Positive hard constraints were relaxed to keep the pool non-empty.
    bool fallback = false;
    std::vector<Constraint> relaxed;
    // Even the negative constraints alone leave nothing; the feed is empty.
    bool pool_exhausted = false;
    std::vector<std::string> warnings;
};

enum class PlannerMode { full, semantic_only, random };

const char* to_string(PlannerMode m);
std::optional<PlannerMode> parse_planner_mode(std::string_view name);

ToolChain select_tools(const PreferenceState& prefs, bool has_history);

struct PlanResult {
    Feed feed;
    PlanTrace trace;
    // Every surviving item in ranking order (the feed is its top-k prefix).
    std::vector<FeedEntry> ranking;
};

/**
 * Rule-based planning agent over a shared item index.
 */
class Planner {
public:
    Planner(std::shared_ptr<const ItemIndex> index, ToolParams params, PlannerMode mode = PlannerMode::full,
            std::uint64_t seed = 0);

    ToolChain plan(const PreferenceState& prefs, const UserHistory& history) const;
    PlanResult execute(const ToolChain& chain, const PreferenceState& prefs, const UserHistory& history, int k,
                       int round) const;
    PlanResult run(const PreferenceState& prefs, const UserHistory& history, int k, int round) const
    {
        return execute(plan(prefs, history), prefs, history, k, round);
    }

    const ItemIndex& index() const { return *index_; }
    const ToolParams& params() const { return params_; }
    PlannerMode mode() const { return mode_; }
    std::uint64_t seed() const { return seed_; }

private:
    std::shared_ptr<const ItemIndex> index_;
    ToolParams params_;
    PlannerMode mode_;
    std::uint64_t seed_;
};

} // namespace recfeed
