#pragma once

#include "recfeed/feed.hpp"
#include "recfeed/parser.hpp"
#include "recfeed/planner.hpp"
#include "recfeed/preference.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace recfeed {

enum class SessionStatus { active, satisfied, exhausted };

const char* to_string(SessionStatus s);
std::optional<SessionStatus> parse_session_status(std::string_view name);

struct SessionConfig {
    int t_max = 5;
    int k = 5;
    // Open with the attention path over the history instead of popularity.
    bool aia_cold_start = false;

    void validate() const;

    bool operator==(const SessionConfig&) const = default;
};

struct Event {
    std::string kind; // created | command | feed | status
    int round = 0;
    nlohmann::json payload;
    std::string timestamp;
};

struct Session {
    std::string id;
    std::string user_id;
    UserHistory history;
    SessionConfig config;
    PreferenceState memory;
    std::vector<Feed> feeds;
    std::vector<Command> commands;
    std::vector<PlanTrace> traces;
    std::vector<FeedbackClass> feedback;
    std::vector<bool> degraded;
    int round = 0;
    SessionStatus status = SessionStatus::active;
    std::vector<Event> events;

    const Feed& current_feed() const { return feeds.back(); }
    const PlanTrace& current_trace() const { return traces.back(); }
};

struct StepResult {
    Feed feed;
    // The full surviving pool in ranking order.
    std::vector<FeedEntry> ranking;
};

/**
 * Runs the parse -> plan -> execute loop. Steps are atomic: on any error the
 * session is left exactly as it was.
 */
class SessionEngine {
public:
    using SatisfyPredicate = std::function<bool(const Feed&)>;
    using ClockFn = std::function<std::string()>;

    SessionEngine(std::shared_ptr<const ParserBackend> parser, std::shared_ptr<const Planner> planner);

    Session create(std::string id, std::string user_id, const std::vector<std::string>& history,
                   SessionConfig config = {}) const;

    // satisfy_signal is the live user's verdict; auto_satisfy is consulted on
    // the new feed when no signal is given (simulation).
    StepResult step(Session& session, const std::string& text, std::optional<bool> satisfy_signal = std::nullopt,
                    const SatisfyPredicate& auto_satisfy = {}) const;

    const Catalog& catalog() const { return planner_->index().catalog(); }
    const Planner& planner() const { return *planner_; }
    const ParserBackend& parser() const { return *parser_; }

    void set_clock(ClockFn clock) { clock_ = std::move(clock); }

private:
    std::string now() const;

    std::shared_ptr<const ParserBackend> parser_;
    std::shared_ptr<const Planner> planner_;
    ClockFn clock_;
};

nlohmann::json to_json(const ToolChain& chain);
ToolChain chain_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PlanTrace& trace, bool with_timing = true);
nlohmann::json to_json(const SessionConfig& config);
SessionConfig session_config_from_json(const nlohmann::json& j);

std::string to_line(const Event& e);
// nullopt on a corrupt line.
std::optional<Event> parse_event_line(const std::string& line);

struct EventLogRead {
    std::vector<Event> events;
    std::size_t corrupt = 0;
};

EventLogRead read_event_log(std::istream& in);
void write_event_log(std::ostream& out, const std::vector<Event>& events);

struct ReplayReport {
    std::size_t steps = 0;
    std::size_t feeds_compared = 0;
    std::vector<std::string> mismatches;
    std::optional<Session> session;

    bool ok() const { return mismatches.empty() && session.has_value(); }
};

// Re-runs the recorded commands against a fresh session and compares every
// produced feed byte-for-byte with the recorded one.
ReplayReport replay(const std::vector<Event>& events, const SessionEngine& engine);

} // namespace recfeed
