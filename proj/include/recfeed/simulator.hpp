#pragma once

#include "recfeed/catalog.hpp"
#include "recfeed/feed.hpp"
#include "recfeed/metrics.hpp"
#include "recfeed/planner.hpp"
#include "recfeed/session.hpp"
#include "recfeed/synthetic.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace recfeed {

enum class PersonaStyle { terse, verbose, mixed };
enum class ScenarioMode { sr, mr, mrid };
enum class RankingMode { feed, full };

const char* to_string(PersonaStyle s);
const char* to_string(ScenarioMode m);
const char* to_string(RankingMode m);
std::optional<ScenarioMode> parse_scenario_mode(std::string_view name);
std::optional<RankingMode> parse_ranking_mode(std::string_view name);

struct Persona {
    PersonaStyle style = PersonaStyle::mixed;
    double negative_ratio = 0.57;
    std::uint64_t reveal_seed = 0;
    std::uint64_t seed = 0;

    void validate() const;
};

// Everything the simulated user has said so far.
struct RevealState {
    std::set<std::string> revealed;
    // Keys revealed while chasing a pseudo-target (interest drift).
    std::set<std::string> stale;
};

// Reveal order: the catalog's reveal keys shuffled by the persona's reveal seed.
std::vector<std::string> reveal_order(const Catalog& catalog, const Persona& persona);

/**
 * Produces the next grammar-conformant command. `change` prefixes the
 * command with an explicit change marker; `avoid` lists values the command
 * must not mention.
 */
Command simulate_feedback(const Feed& feed, const Item& target, const Persona& persona, RevealState& state,
                          const Catalog& catalog, ScenarioMode mode, int round, bool change = false,
                          const std::vector<std::pair<std::string, AttributeValue>>& avoid = {});

struct ScenarioConfig {
    ScenarioMode mode = ScenarioMode::mr;
    int t_max = 5;
    int k = 5;
    int drift_round = 3;
    std::uint64_t seed = 42;
    RankingMode ranking = RankingMode::feed;
    PersonaStyle style = PersonaStyle::mixed;
    double negative_ratio = 0.57;

    void validate() const;
};

struct UserTrace {
    std::string user_id;
    std::string target;
    std::optional<std::string> pseudo_target;
    bool passed = false;
    int rounds = 0;
    std::vector<std::string> commands;
    std::vector<std::vector<std::string>> feeds;
    // Feed items that matched a negative hard constraint in force for that feed.
    std::size_t negative_violations = 0;
    std::map<std::size_t, double> recall, ndcg;
    std::map<std::size_t, double> csr;
    bool csr_defined = false;
};

struct BenchmarkReport {
    ScenarioConfig config;
    std::string variant;
    std::size_t users = 0;
    std::map<std::size_t, double> recall, ndcg, csr;
    std::size_t csr_excluded = 0;
    double pass_rate = 0.0;
    double avg_rounds = 0.0;
    std::size_t negative_violations = 0;
    std::vector<UserTrace> traces;

    nlohmann::json to_json(bool with_traces = true) const;
};

constexpr std::array<std::size_t, 3> kMetricCutoffs = {10, 20, 50};

// SR mode runs with a single round regardless of config.t_max.
// on_finished sees every terminal session; calls are serialized.
BenchmarkReport run_scenario(const ScenarioConfig& config, const std::vector<SyntheticUser>& users,
                             const SessionEngine& engine,
                             const std::function<void(const Session&)>& on_finished = {});

} // namespace recfeed
