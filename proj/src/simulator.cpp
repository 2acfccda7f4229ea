#include "recfeed/simulator.hpp"

#include "recfeed/error.hpp"
#include "recfeed/text.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>

namespace recfeed {

using nlohmann::json;

const char* to_string(PersonaStyle s)
{
    switch (s) {
    case PersonaStyle::terse:
        return "terse";
    case PersonaStyle::verbose:
        return "verbose";
    case PersonaStyle::mixed:
        return "mixed";
    }
    return "mixed";
}

const char* to_string(ScenarioMode m)
{
    switch (m) {
    case ScenarioMode::sr:
        return "sr";
    case ScenarioMode::mr:
        return "mr";
    case ScenarioMode::mrid:
        return "mrid";
    }
    return "mr";
}

const char* to_string(RankingMode m)
{
    return m == RankingMode::feed ? "feed" : "full";
}

std::optional<ScenarioMode> parse_scenario_mode(std::string_view name)
{
    auto lower = text::to_lower(name);
    if (lower == "sr")
        return ScenarioMode::sr;
    if (lower == "mr")
        return ScenarioMode::mr;
    if (lower == "mrid")
        return ScenarioMode::mrid;
    return std::nullopt;
}

std::optional<RankingMode> parse_ranking_mode(std::string_view name)
{
    if (name == "feed")
        return RankingMode::feed;
    if (name == "full")
        return RankingMode::full;
    return std::nullopt;
}

void Persona::validate() const
{
    if (!(negative_ratio >= 0.0 && negative_ratio <= 1.0))
        throw ConfigError("negative_ratio must lie in [0, 1]");
}

void ScenarioConfig::validate() const
{
    if (t_max < 1 || k < 1)
        throw ConfigError("t_max and k must be at least 1");
    if (mode == ScenarioMode::mrid && (drift_round < 1 || drift_round >= t_max))
        throw ConfigError("drift_round must lie in [1, t_max)");
    if (!(negative_ratio >= 0.0 && negative_ratio <= 1.0))
        throw ConfigError("negative_ratio must lie in [0, 1]");
}

namespace {

std::uint64_t mix(std::uint64_t seed, const std::string& salt)
{
    return text::fnv1a64(salt, text::kFnvOffset ^ (seed * 0x9e3779b97f4a7c15ULL));
}

double unit_from(std::uint64_t h)
{
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

struct Range {
    double lo, hi;
};

Range band_of(double v, double step)
{
    double lo = std::floor(v / step) * step;
    return {lo, lo + step};
}

// Phrase for the target's value on `key`, as the grammar expects it.
std::string request(const std::string& key, const AttributeSpec& spec, const std::vector<AttributeValue>& values)
{
    if (spec.kind == ValueKind::number && spec.step) {
        auto r = band_of(values.front().as_number(), *spec.step);
        return key + " between " + text::format_number(r.lo) + " and " + text::format_number(r.hi);
    }
    std::vector<std::string> parts;
    for (const auto& v : values)
        parts.push_back(spec.kind == ValueKind::number ? text::format_number(v.as_number()) : to_string(v));
    return key + ": " + text::join(parts, " or ");
}

bool violates(const Item& item, const std::string& key, const AttributeSpec& spec,
              const std::vector<AttributeValue>& wanted)
{
    const auto* have = item.find(key);
    if (!have)
        return true;
    if (spec.kind == ValueKind::number && spec.step) {
        auto r = band_of(wanted.front().as_number(), *spec.step);
        return std::none_of(have->begin(), have->end(), [&](const AttributeValue& v) {
            return v.as_number() >= r.lo && v.as_number() <= r.hi;
        });
    }
    return std::none_of(have->begin(), have->end(), [&](const AttributeValue& v) {
        return std::any_of(wanted.begin(), wanted.end(), [&](const AttributeValue& w) { return v.same_value(w); });
    });
}

} // namespace

std::vector<std::string> reveal_order(const Catalog& catalog, const Persona& persona)
{
    auto keys = catalog.reveal_keys();
    std::mt19937_64 rng(persona.reveal_seed);
    for (std::size_t i = keys.size(); i > 1; --i)
        std::swap(keys[i - 1], keys[static_cast<std::size_t>(rng() % i)]);
    return keys;
}

Command simulate_feedback(const Feed& feed, const Item& target, const Persona& persona, RevealState& state,
                          const Catalog& catalog, ScenarioMode mode, int round, bool change,
                          const std::vector<std::pair<std::string, AttributeValue>>& avoid)
{
    persona.validate();
    auto order = reveal_order(catalog, persona);

    if (mode == ScenarioMode::sr) {
        std::vector<std::string> parts;
        for (const auto& key : order) {
            const auto* values = target.find(key);
            if (!values)
                continue;
            parts.push_back(request(key, *catalog.spec(key), *values));
            state.revealed.insert(key);
        }
        if (parts.empty())
            return Command::make("looks great, thanks", round);
        return Command::make("want " + text::join(parts, ", "), round);
    }

    std::optional<std::string> key;
    bool restating = false;
    if (change) {
        for (const auto& k : order) {
            if (state.stale.count(k) && target.find(k)) {
                key = k;
                restating = true;
                break;
            }
        }
    }
    if (!key) {
        for (const auto& k : order) {
            if (!state.revealed.count(k) && target.find(k)) {
                key = k;
                break;
            }
        }
    }
    if (!key)
        return Command::make("looks great, thanks", round);
    state.revealed.insert(*key);
    state.stale.erase(*key);

    const auto& spec = *catalog.spec(*key);
    const auto& wanted = *target.find(*key);
    auto h = mix(persona.seed, "round:" + std::to_string(round));
    bool negative_draw = unit_from(h) < persona.negative_ratio;
    bool verbose = persona.style == PersonaStyle::verbose ||
                   (persona.style == PersonaStyle::mixed && ((h >> 7) & 1U));

    const Item* top = feed.entries.empty() ? nullptr : catalog.find(feed.entries.front().item_id);
    std::string body;
    if (negative_draw && top && violates(*top, *key, spec, wanted)) {
        const auto* have = top->find(*key);
        if (spec.kind == ValueKind::number && spec.step) {
            std::string complaint;
            if (have) {
                auto r = band_of(wanted.front().as_number(), *spec.step);
                bool high = have->front().as_number() > r.hi;
                if (*key == "price")
                    complaint = high ? "too expensive" : "too cheap";
                else
                    complaint = high ? "too high" : "too low";
            } else {
                complaint = "not that range";
            }
            if (verbose && have)
                complaint = "not that range";
            body = complaint + "; " + (verbose ? "show me " : "want ") + request(*key, spec, wanted);
        } else if (have && spec.kind == ValueKind::text) {
            const auto& u = have->front();
            bool forbidden = std::any_of(avoid.begin(), avoid.end(), [&](const auto& a) {
                return a.first == *key && a.second.same_value(u);
            });
            if (!forbidden) {
                body = verbose ? "not a fan of " + u.as_text() + "; show me " + request(*key, spec, wanted)
                               : "no " + *key + ": " + u.as_text() + "; want " + request(*key, spec, wanted);
            }
        }
    }
    if (body.empty())
        body = verbose ? "could you show me " + request(*key, spec, wanted) + " please" : "want " + request(*key, spec, wanted);
    if (restating)
        body = "different from before, " + body;
    return Command::make(body, round);
}

BenchmarkReport run_scenario(const ScenarioConfig& config_in, const std::vector<SyntheticUser>& users,
                             const SessionEngine& engine, const std::function<void(const Session&)>& on_finished)
{
    config_in.validate();
    if (users.empty())
        throw PreconditionError("scenario needs at least one user");
    ScenarioConfig config = config_in;
    if (config.mode == ScenarioMode::sr)
        config.t_max = 1;

    const Catalog& catalog = engine.catalog();
    const auto csr_keys = catalog.csr_keys();
    std::vector<UserTrace> traces(users.size());

    const auto n = static_cast<std::ptrdiff_t>(users.size());
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t ui = 0; ui < n; ++ui) {
        try {
            const auto& user = users[static_cast<std::size_t>(ui)];
            UserTrace& tr = traces[static_cast<std::size_t>(ui)];
            tr.user_id = user.user_id;
            tr.target = user.target;
            const Item* target = catalog.find(user.target);
            if (!target)
                throw PreconditionError("target '" + user.target + "' not in catalog");

            SessionConfig sc;
            sc.t_max = config.t_max;
            sc.k = config.k;
            auto session = engine.create(user.user_id, user.user_id, user.history, sc);

            Persona persona;
            persona.style = config.style;
            persona.negative_ratio = config.negative_ratio;
            persona.reveal_seed = mix(config.seed, "reveal:" + user.user_id);
            persona.seed = mix(config.seed, "persona:" + user.user_id);

            const Item* pseudo = nullptr;
            std::vector<std::pair<std::string, AttributeValue>> exclusive;
            if (config.mode == ScenarioMode::mrid) {
                auto h = mix(config.seed, "pseudo:" + user.user_id);
                auto idx = static_cast<std::size_t>(h % catalog.size());
                if (catalog.at(idx).id == target->id)
                    idx = (idx + 1) % catalog.size();
                pseudo = &catalog.at(idx);
                tr.pseudo_target = pseudo->id;
                for (const auto& [key, values] : target->attributes) {
                    const auto* other = pseudo->find(key);
                    for (const auto& v : values) {
                        bool shared = other && std::any_of(other->begin(), other->end(),
                                                           [&](const AttributeValue& x) { return x.same_value(v); });
                        if (!shared)
                            exclusive.emplace_back(key, v);
                    }
                }
            }

            auto delivered = [&](const Feed& f) { return f.contains(target->id); };
            RevealState state;
            bool drifted = false;
            std::vector<FeedEntry> ranking;
            while (session.status == SessionStatus::active) {
                int interaction = session.round + 1;
                bool drift = pseudo && interaction >= config.drift_round;
                if (drift && !drifted) {
                    state.stale = state.revealed;
                    state.revealed.clear();
                    drifted = true;
                }
                const Item& aim = (pseudo && !drift) ? *pseudo : *target;
                auto cmd = simulate_feedback(session.current_feed(), aim, persona, state, catalog, config.mode,
                                             session.round, drift, drift ? decltype(exclusive){} : exclusive);
                tr.commands.push_back(cmd.text);
                auto res = engine.step(session, cmd.text, std::nullopt, delivered);
                ranking = std::move(res.ranking);
                tr.feeds.push_back(session.current_feed().item_ids());
                for (const auto& e : session.current_feed().entries) {
                    const Item* item = catalog.find(e.item_id);
                    for (const auto& c : session.memory.negative_hard) {
                        if (evaluate(c, *item) == MatchResult::holds)
                            ++tr.negative_violations;
                    }
                }
            }
            if (on_finished) {
#pragma omp critical(recfeed_scenario_sink)
                on_finished(session);
            }
            tr.passed = session.status == SessionStatus::satisfied;
            tr.rounds = tr.passed ? session.round : config.t_max + 1;

            std::vector<std::string> ids;
            if (config.ranking == RankingMode::feed) {
                ids = session.current_feed().item_ids();
            } else {
                for (const auto& e : ranking)
                    ids.push_back(e.item_id);
            }
            for (auto cutoff : kMetricCutoffs) {
                tr.recall[cutoff] = recall_at(ids, target->id, cutoff);
                tr.ndcg[cutoff] = ndcg_at(ids, target->id, cutoff);
                if (auto c = csr_at(ids, *target, cutoff, catalog, csr_keys)) {
                    tr.csr[cutoff] = *c;
                    tr.csr_defined = true;
                }
            }
        } catch (...) {
#pragma omp critical(recfeed_scenario_failure)
            if (!failure)
                failure = std::current_exception();
        }
    }
    if (failure)
        std::rethrow_exception(failure);

    BenchmarkReport report;
    report.config = config;
    report.variant = to_string(engine.planner().mode());
    report.users = users.size();
    std::vector<SessionOutcome> outcomes;
    std::size_t csr_count = 0;
    for (const auto& tr : traces) {
        outcomes.push_back({tr.passed, tr.rounds});
        report.negative_violations += tr.negative_violations;
        for (auto cutoff : kMetricCutoffs) {
            report.recall[cutoff] += tr.recall.at(cutoff);
            report.ndcg[cutoff] += tr.ndcg.at(cutoff);
            if (tr.csr_defined)
                report.csr[cutoff] += tr.csr.at(cutoff);
        }
        if (tr.csr_defined)
            ++csr_count;
        else
            ++report.csr_excluded;
    }
    for (auto cutoff : kMetricCutoffs) {
        report.recall[cutoff] /= static_cast<double>(traces.size());
        report.ndcg[cutoff] /= static_cast<double>(traces.size());
        report.csr[cutoff] = csr_count ? report.csr[cutoff] / static_cast<double>(csr_count) : 0.0;
    }
    report.pass_rate = pass_rate(outcomes);
    report.avg_rounds = avg_rounds(outcomes, config.t_max);
    report.traces = std::move(traces);
    return report;
}

json BenchmarkReport::to_json(bool with_traces) const
{
    json metrics = json::object();
    for (auto cutoff : kMetricCutoffs) {
        auto n = std::to_string(cutoff);
        metrics["recall@" + n] = recall.at(cutoff);
        metrics["ndcg@" + n] = ndcg.at(cutoff);
        metrics["csr@" + n] = csr.at(cutoff);
    }
    json j = {{"config",
               {{"mode", recfeed::to_string(config.mode)},
                {"t_max", config.t_max},
                {"k", config.k},
                {"drift_round", config.drift_round},
                {"seed", config.seed},
                {"ranking", recfeed::to_string(config.ranking)},
                {"persona_style", recfeed::to_string(config.style)},
                {"negative_ratio", config.negative_ratio}}},
              {"variant", variant},
              {"users", users},
              {"metrics", metrics},
              {"csr_definition", "mean over top-N items of |shared designated values| / |target designated values|"},
              {"csr_excluded", csr_excluded},
              {"pass_rate", pass_rate},
              {"avg_rounds", avg_rounds},
              {"negative_violations", negative_violations}};
    if (with_traces) {
        json users_json = json::array();
        for (const auto& t : traces) {
            json u = {{"user_id", t.user_id},
                      {"target", t.target},
                      {"passed", t.passed},
                      {"rounds", t.rounds},
                      {"commands", t.commands},
                      {"feeds", t.feeds},
                      {"negative_violations", t.negative_violations}};
            if (t.pseudo_target)
                u["pseudo_target"] = *t.pseudo_target;
            users_json.push_back(std::move(u));
        }
        j["traces"] = std::move(users_json);
    }
    return j;
}

} // namespace recfeed
