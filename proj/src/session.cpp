#include "recfeed/session.hpp"

#include "recfeed/error.hpp"
#include "recfeed/json_io.hpp"

#include <chrono>
#include <ctime>
#include <istream>
#include <ostream>

namespace recfeed {

using nlohmann::json;

const char* to_string(SessionStatus s)
{
    switch (s) {
    case SessionStatus::active:
        return "active";
    case SessionStatus::satisfied:
        return "satisfied";
    case SessionStatus::exhausted:
        return "exhausted";
    }
    return "active";
}

std::optional<SessionStatus> parse_session_status(std::string_view name)
{
    if (name == "active")
        return SessionStatus::active;
    if (name == "satisfied")
        return SessionStatus::satisfied;
    if (name == "exhausted")
        return SessionStatus::exhausted;
    return std::nullopt;
}

void SessionConfig::validate() const
{
    if (t_max < 1)
        throw ConfigError("t_max must be at least 1");
    if (k < 1)
        throw ConfigError("k must be at least 1");
}

json to_json(const ToolChain& chain)
{
    json stages = json::array();
    for (const auto& s : chain.stages)
        stages.push_back({{"tools", s.tools}, {"rationale", s.rationale}});
    return stages;
}

ToolChain chain_from_json(const json& j)
{
    ToolChain chain;
    for (const auto& s : j)
        chain.stages.push_back({s.at("tools").get<std::vector<std::string>>(), s.value("rationale", "")});
    return chain;
}

json to_json(const PlanTrace& trace, bool with_timing)
{
    json j = {{"chain", to_json(trace.chain)},
              {"pool_before", trace.pool_before},
              {"pool_after", trace.pool_after},
              {"fallback", trace.fallback},
              {"relaxed", trace.relaxed},
              {"pool_exhausted", trace.pool_exhausted},
              {"warnings", trace.warnings}};
    if (with_timing)
        j["stage_ms"] = trace.stage_ms;
    return j;
}

json to_json(const SessionConfig& config)
{
    return {{"t_max", config.t_max}, {"k", config.k}, {"aia_cold_start", config.aia_cold_start}};
}

SessionConfig session_config_from_json(const json& j)
{
    SessionConfig c;
    c.t_max = j.value("t_max", c.t_max);
    c.k = j.value("k", c.k);
    c.aia_cold_start = j.value("aia_cold_start", c.aia_cold_start);
    return c;
}

SessionEngine::SessionEngine(std::shared_ptr<const ParserBackend> parser, std::shared_ptr<const Planner> planner)
    : parser_(std::move(parser)), planner_(std::move(planner))
{
    if (!parser_ || !planner_)
        throw ConfigError("session engine needs a parser and a planner");
}

std::string SessionEngine::now() const
{
    if (clock_)
        return clock_();
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace {

json feed_payload(const Session& s)
{
    json j = {{"feed", s.current_feed()},
              {"memory", s.memory},
              {"chain", to_json(s.current_trace().chain)},
              {"trace", to_json(s.current_trace())}};
    if (!s.feedback.empty() && s.feeds.size() > 1) {
        j["feedback"] = s.feedback.back();
        j["degraded"] = static_cast<bool>(s.degraded.back());
    }
    return j;
}

} // namespace

Session SessionEngine::create(std::string id, std::string user_id, const std::vector<std::string>& history,
                              SessionConfig config) const
{
    config.validate();
    Session s;
    s.id = std::move(id);
    s.user_id = std::move(user_id);
    s.config = config;
    s.history = UserHistory(history, catalog());

    PlanResult r;
    if (config.aia_cold_start && !s.history.empty()) {
        ToolChain chain;
        chain.stages.push_back({{"Matcher"}, "cold start from interaction history"});
        chain.stages.push_back({{"Aggregator"}, "rank by match score"});
        r = planner_->execute(chain, s.memory, s.history, config.k, 0);
    } else {
        ToolChain chain;
        chain.stages.push_back({{"DefaultRanker"}, "no stated preferences: rank by popularity"});
        r = planner_->execute(chain, s.memory, s.history, config.k, 0);
    }
    s.feeds.push_back(std::move(r.feed));
    s.traces.push_back(std::move(r.trace));

    auto ts = now();
    s.events.push_back({"created",
                        0,
                        {{"session_id", s.id},
                         {"user_id", s.user_id},
                         {"history", s.history.items()},
                         {"config", to_json(s.config)},
                         {"parser", parser_->name()},
                         {"planner", to_string(planner_->mode())},
                         {"planner_seed", planner_->seed()}},
                        ts});
    s.events.push_back({"feed", 0, feed_payload(s), ts});
    return s;
}

StepResult SessionEngine::step(Session& session, const std::string& text, std::optional<bool> satisfy_signal,
                               const SatisfyPredicate& auto_satisfy) const
{
    if (session.status != SessionStatus::active)
        throw StateError("session '" + session.id + "' is " + to_string(session.status));

    Session next = session;
    auto command = Command::make(text, next.round);
    auto outcome = parser_->parse(next.current_feed(), command, next.memory);
    auto problems = validate(outcome.state);
    if (!problems.empty())
        throw Error("parser produced an invalid state: " + problems.front());

    auto plan = planner_->run(outcome.state, next.history, next.config.k, next.round + 1);

    next.memory = std::move(outcome.state);
    next.commands.push_back(command);
    next.feedback.push_back(outcome.feedback);
    next.degraded.push_back(outcome.degraded);
    next.feeds.push_back(plan.feed);
    next.traces.push_back(plan.trace);
    next.round += 1;

    bool satisfied = satisfy_signal ? *satisfy_signal : (auto_satisfy ? auto_satisfy(plan.feed) : false);
    auto before = next.status;
    if (satisfied)
        next.status = SessionStatus::satisfied;
    else if (next.round >= next.config.t_max)
        next.status = SessionStatus::exhausted;

    auto ts = now();
    json cmd = {{"text", command.text}, {"round", command.round}};
    cmd["satisfied"] = satisfied;
    next.events.push_back({"command", command.round, std::move(cmd), ts});
    next.events.push_back({"feed", next.round, feed_payload(next), ts});
    if (next.status != before)
        next.events.push_back({"status", next.round, {{"status", to_string(next.status)}}, ts});

    session = std::move(next);
    return {std::move(plan.feed), std::move(plan.ranking)};
}

std::string to_line(const Event& e)
{
    json j = {{"kind", e.kind}, {"round", e.round}, {"payload", e.payload}, {"timestamp", e.timestamp}};
    return j.dump();
}

std::optional<Event> parse_event_line(const std::string& line)
{
    try {
        auto j = json::parse(line);
        if (!j.is_object())
            return std::nullopt;
        Event e;
        e.kind = j.at("kind").get<std::string>();
        if (e.kind != "created" && e.kind != "command" && e.kind != "feed" && e.kind != "status")
            return std::nullopt;
        e.round = j.at("round").get<int>();
        e.payload = j.at("payload");
        if (!e.payload.is_object())
            return std::nullopt;
        e.timestamp = j.value("timestamp", "");
        return e;
    } catch (const json::exception&) {
        return std::nullopt;
    }
}

EventLogRead read_event_log(std::istream& in)
{
    EventLogRead out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        if (auto e = parse_event_line(line))
            out.events.push_back(std::move(*e));
        else
            ++out.corrupt;
    }
    return out;
}

void write_event_log(std::ostream& out, const std::vector<Event>& events)
{
    for (const auto& e : events)
        out << to_line(e) << '\n';
}

ReplayReport replay(const std::vector<Event>& events, const SessionEngine& engine)
{
    ReplayReport report;
    std::vector<const Event*> commands;
    std::vector<const Event*> feeds;
    const Event* created = nullptr;
    for (const auto& e : events) {
        if (e.kind == "created" && !created)
            created = &e;
        else if (e.kind == "command")
            commands.push_back(&e);
        else if (e.kind == "feed")
            feeds.push_back(&e);
    }
    if (!created) {
        report.mismatches.push_back("log has no created event");
        return report;
    }

    try {
        const auto& p = created->payload;
        auto mode = p.value("planner", std::string(to_string(engine.planner().mode())));
        auto seed = p.value("planner_seed", engine.planner().seed());
        if (mode != to_string(engine.planner().mode()) || seed != engine.planner().seed()) {
            report.mismatches.push_back("log was recorded with planner " + mode + " seed " + std::to_string(seed));
            return report;
        }
        auto session = engine.create(p.at("session_id").get<std::string>(), p.at("user_id").get<std::string>(),
                                     p.at("history").get<std::vector<std::string>>(),
                                     session_config_from_json(p.at("config")));
        auto compare = [&](std::size_t i) {
            if (i >= feeds.size()) {
                report.mismatches.push_back("no recorded feed for round " + std::to_string(i));
                return;
            }
            ++report.feeds_compared;
            auto recorded = serialize(feeds[i]->payload.at("feed").get<Feed>());
            auto produced = serialize(session.feeds.at(i));
            if (recorded != produced)
                report.mismatches.push_back("feed " + std::to_string(i) + " differs");
        };
        compare(0);
        for (std::size_t i = 0; i < commands.size(); ++i) {
            const auto& c = commands[i]->payload;
            std::optional<bool> signal;
            if (c.contains("satisfied") && c.at("satisfied").is_boolean())
                signal = c.at("satisfied").get<bool>();
            engine.step(session, c.at("text").get<std::string>(), signal);
            ++report.steps;
            compare(i + 1);
        }
        report.session = std::move(session);
    } catch (const std::exception& e) {
        report.mismatches.push_back(std::string("replay failed: ") + e.what());
    }
    return report;
}

} // namespace recfeed
