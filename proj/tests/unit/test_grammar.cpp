#include <doctest.h>

#include "fixtures.hpp"
#include "recfeed/json_io.hpp"
#include "recfeed/parser.hpp"

using namespace recfeed;
using namespace recfeed::testing;

namespace {

std::shared_ptr<const Catalog> movie_catalog()
{
    Schema schema;
    schema["genre"] = AttributeSpec{ValueKind::text, false, true, false, std::nullopt, ""};
    schema["language"] = AttributeSpec{ValueKind::text, true, false, false, std::nullopt, ""};
    schema["year"] = AttributeSpec{ValueKind::number, true, false, false, std::nullopt, ""};
    schema["price"] = AttributeSpec{ValueKind::number, true, false, false, std::nullopt, "USD"};
    std::vector<Item> items = {
        make_item("m1", {{"genre", {txt("romantic")}}, {"language", {txt("english")}}, {"year", {num(1994)}}}),
        make_item("m2", {{"genre", {txt("thriller")}}, {"language", {txt("french")}}, {"year", {num(2005)}}}),
        make_item("m3", {{"genre", {txt("mystery")}}, {"language", {txt("english")}}, {"year", {num(2012)}}}),
    };
    return std::make_shared<const Catalog>(std::move(schema), std::move(items));
}

Feed feed_of(std::initializer_list<const char*> ids)
{
    Feed f;
    f.k = 5;
    for (auto id : ids)
        f.entries.push_back(FeedEntry{id, {}});
    return f;
}

PreferenceState run(const RuleParser& p, const std::string& text, const PreferenceState& memory = {},
                    const Feed& feed = {})
{
    return parse_command(p, feed, Command::make(text, 1), memory);
}

} // namespace

TEST_CASE("price thresholds become positive hard constraints")
{
    RuleParser p(mini_catalog());
    auto s = run(p, "under $50");
    REQUIRE(s.positive_hard.size() == 1);
    CHECK(s.positive_hard[0].attribute == "price");
    CHECK(s.positive_hard[0].op == Op::less_than);
    CHECK(s.positive_hard[0].values[0].as_number() == 50);
    CHECK(s.positive_soft.empty());
    CHECK(s.negative_hard.empty());

    auto b = run(p, "between 100 and 200 price");
    REQUIRE(b.positive_hard.size() == 1);
    CHECK(b.positive_hard[0].op == Op::between);
    CHECK(b.positive_hard[0].values[0].as_number() == 100);
    CHECK(b.positive_hard[0].values[1].as_number() == 200);

    auto r = run(p, "between 200 and 100");
    REQUIRE(r.positive_hard.size() == 1);
    CHECK(r.positive_hard[0].values[0].as_number() == 100);

    auto c = run(p, "at most 1,200 dollars");
    REQUIRE(c.positive_hard.size() == 1);
    CHECK(c.positive_hard[0].op == Op::less_equal);
    CHECK(c.positive_hard[0].values[0].as_number() == 1200);
}

TEST_CASE("soft preferences on catalog values")
{
    RuleParser p(movie_catalog());
    auto s = run(p, "prefer romantic movies");
    REQUIRE(s.positive_soft.size() == 1);
    CHECK(s.positive_soft[0].attribute == "genre");
    CHECK(s.positive_soft[0].op == Op::contains);
    CHECK(s.positive_soft[0].values[0].as_text() == "romantic");
    CHECK(s.positive_hard.empty());

    auto y = run(p, "released after 2000");
    REQUIRE(y.positive_hard.size() == 1);
    CHECK(y.positive_hard[0].attribute == "year");
    CHECK(y.positive_hard[0].op == Op::greater_than);
}

TEST_CASE("negated style request")
{
    RuleParser p(mini_catalog());
    auto s = run(p, "don't want floral dresses");
    REQUIRE(s.negative_soft.size() == 1);
    CHECK(s.negative_soft[0].attribute == "style");
    CHECK(s.negative_soft[0].op == Op::contains);
    CHECK(s.negative_soft[0].values[0].as_text() == "floral");
    CHECK(s.positive_soft.empty());
    CHECK(s.positive_hard.empty());
}

TEST_CASE("deictic references resolve against the feed")
{
    RuleParser p(mini_catalog());
    auto feed = feed_of({"b1", "d1", "s1"});
    auto s = run(p, "more like the first one", {}, feed);
    bool mystery = false;
    for (const auto& c : s.positive_soft) {
        CHECK(c.strictness == Strictness::soft);
        CHECK(c.op == Op::contains);
        if (c.attribute == "category" && c.values[0].as_text() == "mystery")
            mystery = true;
    }
    CHECK(mystery);

    auto last = run(p, "not like the last one", {}, feed);
    REQUIRE_FALSE(last.negative_soft.empty());
    CHECK(last.negative_soft[0].values[0].as_text() == "shoes");

    CHECK(run(p, "like the ninth one", {}, feed).empty());
    auto hash = run(p, "show me more like #2", {}, feed);
    REQUIRE_FALSE(hash.positive_soft.empty());
}

TEST_CASE("explicit pairs follow the schema")
{
    RuleParser p(mini_catalog());
    auto s = run(p, "no brand: aurora; want brand: birch");
    REQUIRE(s.negative_hard.size() == 1);
    CHECK(s.negative_hard[0].values[0].as_text() == "aurora");
    CHECK(s.negative_hard[0].op == Op::equals);
    REQUIRE(s.positive_hard.size() == 1);
    CHECK(s.positive_hard[0].values[0].as_text() == "birch");

    auto ex = run(p, "color != red");
    REQUIRE(ex.positive_hard.size() == 1);
    CHECK(ex.positive_hard[0].op == Op::excludes);

    auto multi = run(p, "color: red or blue");
    REQUIRE(multi.positive_hard.size() == 1);
    CHECK(multi.positive_hard[0].values.size() == 2);

    auto soft = run(p, "style: cozy");
    REQUIRE(soft.positive_soft.size() == 1);
    CHECK(soft.positive_soft[0].op == Op::contains);
}

TEST_CASE("satisfaction and free text")
{
    RuleParser p(mini_catalog());
    PreferenceState memory;
    memory.positive_hard.push_back(make_constraint("price", Op::less_than, {num(50)}));
    auto outcome = p.parse(Feed{}, Command::make("looks great!", 2), memory);
    CHECK(outcome.feedback.kind == FeedbackKind::satisfied);
    CHECK(outcome.state == memory);

    auto free = run(p, "something sparkly for a wedding");
    CHECK(free.all_constraints().empty());
    REQUIRE(free.free_text_positive.size() == 1);
    CHECK(free.free_text_positive[0].find("sparkly") != std::string::npos);

    auto neg = run(p, "nothing too flashy");
    REQUIRE(neg.free_text_negative.size() == 1);
    CHECK(neg.free_text_negative[0].find("flashy") != std::string::npos);
}

TEST_CASE("change markers replace earlier constraints on the key")
{
    RuleParser p(mini_catalog());
    PreferenceState memory;
    memory.positive_hard.push_back(make_constraint("brand", Op::equals, {txt("aurora")}));
    memory.positive_hard.push_back(make_constraint("price", Op::less_than, {num(50)}));

    auto outcome = p.parse(Feed{}, Command::make("brand: birch instead of aurora", 2), memory);
    CHECK(outcome.feedback.kind == FeedbackKind::conflicting);
    CHECK(outcome.feedback.conflict_keys == std::vector<std::string>{"brand"});
    REQUIRE(outcome.state.positive_hard.size() == 2);
    CHECK(outcome.state.positive_hard[0].attribute == "brand");
    CHECK(outcome.state.positive_hard[0].values[0].as_text() == "birch");
    CHECK(outcome.state.positive_hard[1].attribute == "price");
}

TEST_CASE("classification examples")
{
    PreferenceState memory;
    memory.positive_hard.push_back(make_constraint("price", Op::less_than, {num(50)}));
    Extraction e;
    e.positive.push_back(make_constraint("price", Op::between, {num(100), num(200)}, Strictness::hard,
                                         Polarity::positive, 2));
    auto cls = classify_feedback(memory, e, Feed{});
    CHECK(cls.kind == FeedbackKind::conflicting);
    CHECK(cls.conflict_keys == std::vector<std::string>{"price"});

    PreferenceState m2;
    m2.positive_soft.push_back(make_constraint("category", Op::contains, {txt("mystery")}, Strictness::soft));
    Extraction e2;
    e2.positive.push_back(make_constraint("language", Op::equals, {txt("english")}));
    CHECK(classify_feedback(m2, e2, Feed{}).kind == FeedbackKind::compatible);
    CHECK(classify_feedback(m2, Extraction{}, Feed{}).kind == FeedbackKind::satisfied);

    // Equals against excludes on the same value.
    PreferenceState m3;
    m3.positive_hard.push_back(make_constraint("brand", Op::equals, {txt("aurora")}));
    Extraction e3;
    e3.positive.push_back(make_constraint("brand", Op::excludes, {txt("aurora")}));
    CHECK(classify_feedback(m3, e3, Feed{}).kind == FeedbackKind::conflicting);
}

TEST_CASE("consolidation examples")
{
    PreferenceState m;
    m.positive_hard.push_back(make_constraint("price", Op::less_than, {num(50)}));
    Extraction e;
    e.positive.push_back(make_constraint("category", Op::contains, {txt("mystery")}, Strictness::soft));
    auto out = consolidate(m, e, FeedbackClass{FeedbackKind::compatible, {}});
    CHECK(out.positive_hard.size() == 1);
    CHECK(out.positive_soft.size() == 1);
    CHECK(consolidate(m, Extraction{}, FeedbackClass{}) == m);
}

TEST_CASE("rule parser output is a pure function of its inputs")
{
    RuleParser p(mini_catalog());
    auto feed = feed_of({"d1", "b1"});
    const char* commands[] = {"under $50, not red", "more like the first one but no floral",
                              "brand: coral; color: blue or white", "too expensive; want price between 20 and 40"};
    for (auto text : commands) {
        auto a = p.parse(feed, Command::make(text, 3), {});
        auto b = p.parse(feed, Command::make(text, 3), {});
        CHECK(serialize(a.state) == serialize(b.state));
        CHECK(validate(a.state).empty());
    }
}
