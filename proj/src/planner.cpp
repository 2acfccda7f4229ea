#include "recfeed/planner.hpp"

#include "recfeed/error.hpp"
#include "recfeed/text.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <numeric>
#include <set>

namespace recfeed {

bool ToolChain::contains(const std::string& tool) const
{
    return std::any_of(stages.begin(), stages.end(), [&](const Stage& s) {
        return std::find(s.tools.begin(), s.tools.end(), tool) != s.tools.end();
    });
}

std::vector<std::vector<std::string>> ToolChain::shape() const
{
    std::vector<std::vector<std::string>> out;
    for (const auto& s : stages)
        out.push_back(s.tools);
    return out;
}

std::vector<std::string> ToolChain::validate() const
{
    std::vector<std::string> problems;
    if (stages.empty())
        problems.push_back("chain has no stages");
    std::set<std::string> known;
    for (const auto& t : tool_registry())
        known.insert(t.name);
    std::set<std::string> seen;
    for (std::size_t i = 0; i < stages.size(); ++i) {
        if (stages[i].tools.empty())
            problems.push_back("stage " + std::to_string(i + 1) + " is empty");
        for (const auto& t : stages[i].tools) {
            if (!known.count(t))
                problems.push_back("unknown tool '" + t + "'");
            if (!seen.insert(t).second)
                problems.push_back("tool '" + t + "' appears twice");
            if (t == "Filter" && i != 0)
                problems.push_back("Filter must be the first stage");
            if (t == "Aggregator" && i + 1 != stages.size())
                problems.push_back("Aggregator must be the final stage");
        }
        if (std::find(stages[i].tools.begin(), stages[i].tools.end(), "Filter") != stages[i].tools.end() &&
            stages[i].tools.size() != 1)
            problems.push_back("Filter must run alone in its stage");
    }
    bool scoring = contains("Matcher") || contains("Attenuator");
    if (scoring && !contains("Aggregator"))
        problems.push_back("scoring tools require an Aggregator");
    return problems;
}

const char* to_string(PlannerMode m)
{
    switch (m) {
    case PlannerMode::full:
        return "full";
    case PlannerMode::semantic_only:
        return "semantic";
    case PlannerMode::random:
        return "random";
    }
    return "full";
}

std::optional<PlannerMode> parse_planner_mode(std::string_view name)
{
    if (name == "full")
        return PlannerMode::full;
    if (name == "semantic" || name == "semantic_only")
        return PlannerMode::semantic_only;
    if (name == "random")
        return PlannerMode::random;
    return std::nullopt;
}

ToolChain select_tools(const PreferenceState& prefs, bool has_history)
{
    ToolChain chain;
    if (prefs.empty()) {
        chain.stages.push_back({{"DefaultRanker"}, "no stated preferences: rank by popularity"});
        return chain;
    }
    if (prefs.has_hard())
        chain.stages.push_back({{"Filter"}, "hard constraints restrict the candidate pool"});

    Stage scoring;
    std::vector<std::string> why;
    if (prefs.has_positive_soft() || has_history) {
        scoring.tools.push_back("Matcher");
        why.push_back(prefs.has_positive_soft() ? "positive inclinations" : "interaction history");
    }
    if (prefs.has_negative_soft()) {
        scoring.tools.push_back("Attenuator");
        why.push_back("negative inclinations");
    }
    if (!scoring.tools.empty()) {
        scoring.rationale = "score " + text::join(why, " and ");
        chain.stages.push_back(std::move(scoring));
        chain.stages.push_back({{"Aggregator"}, "combine match and attenuation scores"});
    }
    return chain;
}

Planner::Planner(std::shared_ptr<const ItemIndex> index, ToolParams params, PlannerMode mode, std::uint64_t seed)
    : index_(std::move(index)), params_(params), mode_(mode), seed_(seed)
{
    if (!index_)
        throw ConfigError("planner needs an item index");
    params_.validate();
}

ToolChain Planner::plan(const PreferenceState& prefs, const UserHistory& history) const
{
    switch (mode_) {
    case PlannerMode::full:
        return select_tools(prefs, !history.empty());
    case PlannerMode::semantic_only: {
        ToolChain chain;
        if (format_intent(prefs, Polarity::positive).empty()) {
            chain.stages.push_back({{"DefaultRanker"}, "no positive intent: rank by popularity"});
        } else {
            chain.stages.push_back({{"Matcher"}, "semantic path only"});
            chain.stages.push_back({{"Aggregator"}, "rank by match score"});
        }
        return chain;
    }
    case PlannerMode::random: {
        ToolChain chain;
        chain.stages.push_back({{"RandomRanker"}, "random baseline"});
        return chain;
    }
    }
    return {};
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::vector<FeedEntry> popularity_ranking(const Catalog& catalog, const std::vector<std::size_t>& pool)
{
    std::vector<FeedEntry> entries;
    entries.reserve(pool.size());
    for (auto idx : pool) {
        const auto& item = catalog.at(idx);
        FeedEntry e{item.id, {}};
        e.score.s_match = item.popularity;
        e.score.s_final = item.popularity;
        entries.push_back(std::move(e));
    }
    sort_entries(entries);
    return entries;
}

void standardize(std::vector<double>& xs)
{
    if (xs.empty())
        return;
    double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs)
        var += (x - mean) * (x - mean);
    double sd = std::sqrt(var / static_cast<double>(xs.size()));
    for (double& x : xs)
        x = sd > 1e-12 ? (x - mean) / sd : 0.0;
}

bool oldest_first(const Constraint& a, const Constraint& b)
{
    if (a.source_round != b.source_round)
        return a.source_round < b.source_round;
    return constraint_less(a, b);
}

} // namespace

PlanResult Planner::execute(const ToolChain& chain, const PreferenceState& prefs, const UserHistory& history, int k,
                            int round) const
{
    auto problems = chain.validate();
    if (!problems.empty())
        throw PreconditionError("invalid tool chain: " + problems.front());
    if (k <= 0)
        throw PreconditionError("feed size k must be positive");

    const Catalog& catalog = index_->catalog();
    PlanResult result;
    PlanTrace& trace = result.trace;
    trace.chain = chain;

    std::vector<std::size_t> pool(catalog.size());
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    trace.pool_before = pool.size();

    std::vector<FeedEntry> entries;
    bool ranked = false;

    for (const auto& stage : chain.stages) {
        auto t0 = Clock::now();
        auto has = [&](const char* name) {
            return std::find(stage.tools.begin(), stage.tools.end(), name) != stage.tools.end();
        };

        if (has("Filter")) {
            auto res = filter(catalog, pool, prefs.positive_hard, prefs.negative_hard);
            trace.warnings = res.warnings;
            if (res.survivors.empty()) {
                auto remaining = prefs.positive_hard;
                std::sort(remaining.begin(), remaining.end(), oldest_first);
                while (res.survivors.empty() && !remaining.empty()) {
                    trace.fallback = true;
                    trace.relaxed.push_back(remaining.front());
                    remaining.erase(remaining.begin());
                    res = filter(catalog, pool, remaining, prefs.negative_hard);
                }
                if (res.survivors.empty()) {
                    trace.fallback = true;
                    trace.pool_exhausted = true;
                }
            }
            pool = std::move(res.survivors);
        }

        if (has("DefaultRanker")) {
            entries = popularity_ranking(catalog, pool);
            ranked = true;
        }

        if (has("RandomRanker")) {
            entries.clear();
            for (auto idx : pool) {
                const auto& item = catalog.at(idx);
                auto h = text::fnv1a64(std::to_string(seed_) + ":" + std::to_string(round) + ":" + item.id);
                FeedEntry e{item.id, {}};
                e.score.s_match = static_cast<double>(h >> 11) * 0x1.0p-53;
                e.score.s_final = e.score.s_match;
                entries.push_back(std::move(e));
            }
            sort_entries(entries);
            ranked = true;
        }

        bool matcher = has("Matcher");
        bool attenuator = has("Attenuator");
        if (matcher || attenuator) {
            if (entries.empty() || entries.size() != pool.size()) {
                entries.clear();
                for (auto idx : pool)
                    entries.push_back(FeedEntry{catalog.at(idx).id, {}});
            }
            const auto& provider = index_->provider();

            auto run_matcher = [&]() {
                std::vector<ScoreBreakdown> out(pool.size());
                auto intent_text = format_intent(prefs, Polarity::positive);
                bool sem = !intent_text.empty();
                bool aia = mode_ == PlannerMode::full && !history.empty();
                Vector intent = sem ? provider.embed(intent_text) : Vector::zeros(provider.dim());
                std::vector<double> s_sem, s_aia;
                if (sem)
                    s_sem = kernels::cosine_scores(index_->text_embeddings(), pool, intent.span());
                if (aia) {
                    s_aia = aia_scores(pool, intent, history, *index_);
                    for (std::size_t i = 0; i < pool.size(); ++i)
                        out[i].s_aia_raw = s_aia[i];
                    if (params_.standardize_aia)
                        standardize(s_aia);
                }
                for (std::size_t i = 0; i < pool.size(); ++i) {
                    auto& b = out[i];
                    b.semantic_skipped = !sem;
                    b.aia_skipped = !aia;
                    b.s_sem = sem ? s_sem[i] : 0.0;
                    b.s_aia = aia ? s_aia[i] : 0.0;
                    b.s_match = match_score(b.s_sem, b.s_aia, params_, !sem, !aia);
                }
                return out;
            };
            auto run_attenuator = [&]() {
                std::vector<double> out(pool.size(), 0.0);
                auto negative_text = format_intent(prefs, Polarity::negative);
                if (negative_text.empty())
                    return out;
                auto neg = provider.embed(negative_text);
                auto sims = kernels::cosine_scores(index_->text_embeddings(), pool, neg.span());
                for (std::size_t i = 0; i < pool.size(); ++i)
                    out[i] = attenuation_from_similarity(sims[i], params_);
                return out;
            };

            std::vector<ScoreBreakdown> matched;
            std::vector<double> atten;
            if (matcher && attenuator) {
                auto pending = std::async(std::launch::async, run_attenuator);
                matched = run_matcher();
                atten = pending.get();
            } else if (matcher) {
                matched = run_matcher();
            } else {
                atten = run_attenuator();
            }
            for (std::size_t i = 0; i < entries.size(); ++i) {
                if (matcher)
                    entries[i].score = matched[i];
                if (attenuator)
                    entries[i].score.s_atten = atten[i];
                entries[i].score.s_final = entries[i].score.s_match + entries[i].score.s_atten;
            }
        }

        if (has("Aggregator")) {
            aggregate(entries);
            ranked = true;
        }
        trace.stage_ms.push_back(elapsed_ms(t0));
    }

    if (!ranked)
        entries = popularity_ranking(catalog, pool);
    trace.pool_after = pool.size();

    result.ranking = std::move(entries);
    result.feed.round = round;
    result.feed.k = k;
    auto take = std::min(result.ranking.size(), static_cast<std::size_t>(k));
    result.feed.entries.assign(result.ranking.begin(), result.ranking.begin() + static_cast<std::ptrdiff_t>(take));
    return result;
}

} // namespace recfeed
