#include <doctest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "recfeed/json_io.hpp"
#include "recfeed/planner.hpp"
#include "recfeed/runtime.hpp"

#include <algorithm>

using namespace recfeed;
using namespace recfeed::testing;

namespace {

PreferenceState occupancy(bool ph, bool ps, bool nh, bool ns, bool free_text = false)
{
    PreferenceState s;
    if (ph)
        s.positive_hard.push_back(make_constraint("price", Op::less_than, {num(100)}));
    if (ps) {
        if (free_text)
            s.free_text_positive.push_back("comfy");
        else
            s.positive_soft.push_back(make_constraint("style", Op::contains, {txt("cozy")}, Strictness::soft));
    }
    if (nh)
        s.negative_hard.push_back(make_constraint("brand", Op::equals, {txt("coral")}, Strictness::hard,
                                                  Polarity::negative));
    if (ns) {
        if (free_text)
            s.free_text_negative.push_back("flashy");
        else
            s.negative_soft.push_back(make_constraint("style", Op::contains, {txt("floral")}, Strictness::soft,
                                                      Polarity::negative));
    }
    return s;
}

Planner make_planner(std::shared_ptr<const Catalog> cat, ToolParams params = {},
                     PlannerMode mode = PlannerMode::full)
{
    return Planner(make_index(std::move(cat), RuntimeOptions{}), params, mode, 1);
}

} // namespace

TEST_CASE("select_tools matches the occupancy table on every combination")
{
    for (int mask = 0; mask < 16; ++mask) {
        for (bool history : {false, true}) {
            for (bool free_text : {false, true}) {
                bool ph = mask & 1, ps = mask & 2, nh = mask & 4, ns = mask & 8;
                auto chain = select_tools(occupancy(ph, ps, nh, ns, free_text), history);
                CAPTURE(mask);
                CAPTURE(history);
                CHECK(chain.shape() == oracle::expected_chain(ph, ps, nh, ns, history));
                CHECK(chain.validate().empty());
                for (const auto& st : chain.stages)
                    CHECK_FALSE(st.rationale.empty());
            }
        }
    }
    using Shape = std::vector<std::vector<std::string>>;
    CHECK(select_tools(occupancy(1, 1, 1, 1), true).shape() == Shape{{"Filter"}, {"Matcher", "Attenuator"}, {"Aggregator"}});
    CHECK(select_tools(occupancy(0, 0, 0, 1), false).shape() == Shape{{"Attenuator"}, {"Aggregator"}});
    CHECK(select_tools(PreferenceState{}, false).shape() == Shape{{"DefaultRanker"}});
}

TEST_CASE("chain validation")
{
    ToolChain bad;
    bad.stages = {{{"Matcher"}, ""}, {{"Filter"}, ""}, {{"Aggregator"}, ""}};
    CHECK_FALSE(bad.validate().empty());
    ToolChain late;
    late.stages = {{{"Aggregator"}, ""}, {{"Matcher"}, ""}};
    CHECK_FALSE(late.validate().empty());
    ToolChain unknown;
    unknown.stages = {{{"Searcher"}, ""}};
    CHECK_FALSE(unknown.validate().empty());
    auto planner = make_planner(mini_catalog());
    CHECK_THROWS(planner.execute(bad, {}, {}, 5, 1));
    CHECK_THROWS(planner.execute(select_tools({}, false), {}, {}, 0, 1));
}

TEST_CASE("filter-only chain ranks survivors by popularity")
{
    auto cat = mini_catalog();
    auto planner = make_planner(cat);
    PreferenceState s;
    s.positive_hard.push_back(make_constraint("price", Op::less_than, {num(25)}));
    auto r = planner.run(s, {}, 5, 1);
    CHECK(r.trace.chain.shape() == std::vector<std::vector<std::string>>{{"Filter"}});
    // price < 25: b1 (pop 75), b2 (50), b3 (40)
    CHECK(r.feed.item_ids() == std::vector<std::string>{"b1", "b2", "b3"});
    CHECK(r.trace.pool_before == 12);
    CHECK(r.trace.pool_after == 3);
}

TEST_CASE("a unique hard-constraint satisfier is ranked first by the full chain")
{
    Schema schema;
    schema["brand"] = AttributeSpec{ValueKind::text, true, true, true, std::nullopt, ""};
    schema["color"] = AttributeSpec{ValueKind::text, true, true, true, std::nullopt, ""};
    schema["style"] = AttributeSpec{ValueKind::text, false, true, false, std::nullopt, ""};
    std::vector<Item> items;
    const char* brands[] = {"acme", "bolt", "crest", "dune", "echo"};
    const char* colors[] = {"red", "blue", "green", "black", "white", "grey", "pink", "teal", "gold", "navy"};
    for (int i = 0; i < 50; ++i) {
        items.push_back(make_item("x" + std::to_string(100 + i),
                                  {{"brand", {txt(brands[i % 5])}},
                                   {"color", {txt(colors[i / 5])}},
                                   {"style", {txt(i % 2 ? "sporty" : "classic")}}},
                                  i));
    }
    auto cat = std::make_shared<const Catalog>(schema, items);
    auto planner = make_planner(cat);
    PreferenceState s;
    s.positive_hard.push_back(make_constraint("brand", Op::equals, {txt("crest")}));
    s.positive_hard.push_back(make_constraint("color", Op::equals, {txt("teal")}));
    s.positive_soft.push_back(make_constraint("style", Op::contains, {txt("sporty")}, Strictness::soft));
    s.negative_soft.push_back(make_constraint("style", Op::contains, {txt("classic")}, Strictness::soft,
                                              Polarity::negative));

    std::vector<std::string> satisfiers;
    for (const auto& it : cat->items()) {
        if (it.find("brand")->front().as_text() == "crest" && it.find("color")->front().as_text() == "teal")
            satisfiers.push_back(it.id);
    }
    REQUIRE(satisfiers.size() == 1);
    auto r = planner.run(s, UserHistory({"x101", "x102"}, *cat), 5, 1);
    REQUIRE(r.feed.entries.size() == 1);
    CHECK(r.feed.entries[0].item_id == satisfiers[0]);
}

TEST_CASE("matcher alone with alpha 1 orders by semantic score")
{
    auto cat = mini_catalog();
    ToolParams p;
    p.alpha = 1.0;
    auto planner = make_planner(cat, p);
    PreferenceState s;
    s.positive_soft.push_back(make_constraint("style", Op::contains, {txt("cozy")}, Strictness::soft));
    s.free_text_positive.push_back("warm winter reading");
    auto r = planner.run(s, {}, 12, 1);
    REQUIRE(r.trace.chain.shape() == std::vector<std::vector<std::string>>{{"Matcher"}, {"Aggregator"}});

    HashedEmbedding provider(64);
    auto intent = format_intent(s, Polarity::positive);
    std::vector<std::pair<double, std::string>> expected;
    for (const auto& it : cat->items())
        expected.push_back({semantic_score(it, intent, provider), it.id});
    std::sort(expected.begin(), expected.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    REQUIRE(r.feed.entries.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(r.feed.entries[i].item_id == expected[i].second);
        CHECK(r.feed.entries[i].score.s_sem == doctest::Approx(expected[i].first).epsilon(1e-12));
    }
}

TEST_CASE("feeds respect exclusions, feed length and reproducibility")
{
    auto cat = mini_catalog();
    auto planner = make_planner(cat);
    std::mt19937_64 rng(17);
    for (int t = 0; t < 100; ++t) {
        auto m = random_memory(rng);
        std::vector<std::string> hist;
        if (t % 2)
            hist = {"d2", "b4"};
        UserHistory h(hist, *cat);
        int k = 1 + t % 7;
        auto a = planner.run(m, h, k, 1);
        auto b = planner.run(m, h, k, 1);
        REQUIRE(serialize(a.feed) == serialize(b.feed));
        REQUIRE(a.feed.entries.size() == std::min<std::size_t>(k, a.trace.pool_after));
        REQUIRE(a.trace.pool_after <= a.trace.pool_before);
        for (const auto& e : a.feed.entries) {
            const Item& item = *cat->find(e.item_id);
            for (const auto& c : m.negative_hard)
                REQUIRE(evaluate(c, item) != MatchResult::holds);
        }
    }
}

TEST_CASE("fallback ladder drops positives oldest first and never negatives")
{
    auto cat = mini_catalog();
    auto planner = make_planner(cat);
    PreferenceState s;
    s.positive_hard.push_back(make_constraint("brand", Op::equals, {txt("aurora")}, Strictness::hard,
                                              Polarity::positive, 1));
    s.positive_hard.push_back(make_constraint("color", Op::equals, {txt("green")}, Strictness::hard,
                                              Polarity::positive, 2));
    auto r = planner.run(s, {}, 5, 3);
    CHECK(r.trace.fallback);
    CHECK_FALSE(r.trace.pool_exhausted);
    REQUIRE(r.trace.relaxed.size() == 1);
    CHECK(r.trace.relaxed[0].attribute == "brand");
    CHECK(r.feed.item_ids() == std::vector<std::string>{"b2"});

    PreferenceState n = s;
    n.negative_hard.push_back(make_constraint("color", Op::equals, {txt("green")}, Strictness::hard,
                                              Polarity::negative));
    n.positive_hard.pop_back();
    n.positive_hard[0].values = {txt("zenith")};
    auto r2 = planner.run(n, {}, 5, 3);
    CHECK(r2.trace.fallback);
    CHECK(r2.feed.entries.size() == 5);
    for (const auto& id : r2.feed.item_ids())
        CHECK(id != "b2");

    PreferenceState none;
    none.negative_hard.push_back(make_constraint("price", Op::less_than, {num(1000)}, Strictness::hard,
                                                 Polarity::negative));
    auto r3 = planner.run(none, {}, 5, 3);
    CHECK(r3.trace.pool_exhausted);
    CHECK(r3.feed.entries.empty());
}

TEST_CASE("ablation planners")
{
    auto cat = mini_catalog();
    auto sem = make_planner(cat, {}, PlannerMode::semantic_only);
    auto s = occupancy(true, true, true, true);
    auto chain = sem.plan(s, UserHistory({"d1"}, *cat));
    CHECK(chain.shape() == std::vector<std::vector<std::string>>{{"Matcher"}, {"Aggregator"}});
    auto r = sem.run(s, UserHistory({"d1"}, *cat), 5, 1);
    for (const auto& e : r.feed.entries)
        CHECK(e.score.aia_skipped);

    auto rnd = make_planner(cat, {}, PlannerMode::random);
    auto a = rnd.run(s, {}, 12, 1), b = rnd.run(s, {}, 12, 1), c = rnd.run(s, {}, 12, 2);
    CHECK(a.feed == b.feed);
    CHECK_FALSE(a.feed.item_ids() == c.feed.item_ids());
    CHECK(parse_planner_mode("semantic") == PlannerMode::semantic_only);
    CHECK(std::string(to_string(PlannerMode::random)) == "random");
}
