#include <doctest.h>

#include "fixtures.hpp"
#include "recfeed/catalog.hpp"
#include "recfeed/error.hpp"
#include "recfeed/text.hpp"

#include <sstream>

using namespace recfeed;
using namespace recfeed::testing;

TEST_CASE("fnv1a64 matches published test vectors")
{
    CHECK(text::fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(text::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(text::fnv1a64("foobar") == 0x85944171f73967e8ULL);
    CHECK(text::hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("text helpers")
{
    CHECK(text::to_lower("MiXeD") == "mixed");
    CHECK(text::trim("  a b \n") == "a b");
    CHECK(text::tokenize("Don't stop, RED-dress!") == std::vector<std::string>{"don", "t", "stop", "red", "dress"});
    CHECK(text::join({"a", "b", "c"}, ", ") == "a, b, c");
    CHECK(text::format_number(50) == "50");
    CHECK(text::format_number(-3) == "-3");
    CHECK(text::format_number(0.25) == "0.25");
}

TEST_CASE("attribute values compare by kind")
{
    CHECK(txt("Red").same_value(txt("red")));
    CHECK(num(50).same_value(AttributeValue::number(50, "EUR")));
    CHECK_FALSE(txt("50").same_value(num(50)));
    CHECK(to_string(num(45)) == "45 USD");
    CHECK(to_string(AttributeValue::boolean(true)) == "true");
    CHECK(value_less(num(1), num(2)));
}

TEST_CASE("catalog round-trips through its line format and loads idempotently")
{
    auto cat = mini_catalog();
    std::stringstream out;
    write_catalog(out, *cat);
    std::string first = out.str();

    std::istringstream in1(first), in2(first);
    auto a = parse_catalog(in1);
    auto b = parse_catalog(in2);
    CHECK(a == *cat);
    CHECK(a == b);

    std::stringstream again;
    write_catalog(again, a);
    CHECK(again.str() == first);
}

TEST_CASE("catalog lookup and designated keys")
{
    auto cat = mini_catalog();
    REQUIRE(cat->find("b3") != nullptr);
    CHECK(cat->find("b3")->find("color") == nullptr);
    CHECK(cat->index_of("s4") == 11u);
    CHECK_FALSE(cat->index_of("zz").has_value());
    CHECK(cat->image_dim() == 3);
    CHECK(cat->reveal_keys() == std::vector<std::string>{"brand", "color", "price"});
    CHECK(cat->csr_keys() == std::vector<std::string>{"brand", "category", "color", "price", "style"});
}

TEST_CASE("catalog rejects malformed input")
{
    auto parse = [](const std::string& s) {
        std::istringstream in(s);
        return parse_catalog(in);
    };
    const std::string schema = R"({"schema": {"color": "text", "price": {"kind": "number", "hard": true}}})";

    CHECK_THROWS_AS(parse(schema + "\n{\"id\": \"a\"}\n{\"id\": \"a\"}\n"), CatalogError);
    CHECK_THROWS_AS(parse(schema + "\n{\"id\": \"a\", \"attributes\": {\"size\": \"m\"}}\n"), CatalogError);
    CHECK_THROWS_AS(parse(schema + "\n{\"id\": \"a\", \"attributes\": {\"price\": \"cheap\"}}\n"), CatalogError);
    CHECK_THROWS_AS(parse(schema + "\nnot json\n"), CatalogError);
    CHECK_THROWS_AS(parse("{\"schema\": {\"x\": \"colour\"}}\n"), CatalogError);
    try {
        parse(schema + "\n{\"id\": \"a\"}\n{\"id\": \"a\"}\n");
    } catch (const CatalogError& e) {
        CHECK(e.line() == 3);
    }

    auto ok = parse(schema + "\n{\"id\": \"a\", \"attributes\": {\"price\": 12, \"color\": [\"red\", \"blue\"]}}\n");
    CHECK(ok.size() == 1);
    CHECK(ok.at(0).find("color")->size() == 2);
}

TEST_CASE("item text rendering lists attributes in key order")
{
    Item item = make_item("x", {{"price", {num(12)}}, {"color", {txt("red"), txt("blue")}}}, 0, "Mug");
    item.description = "Ceramic.";
    CHECK(render_item_text(item) == "Mug. Ceramic. color: red, blue; price: 12 USD");
}

TEST_CASE("user history rejects unknown ids and keeps the most recent entries")
{
    auto cat = mini_catalog();
    try {
        UserHistory h({"d1", "nope", "gone"}, *cat);
        FAIL("expected PreconditionError");
    } catch (const PreconditionError& e) {
        std::string msg = e.what();
        CHECK(msg.find("nope") != std::string::npos);
        CHECK(msg.find("gone") != std::string::npos);
    }
    std::vector<std::string> many;
    for (int i = 0; i < 60; ++i)
        many.push_back(i % 2 ? "d1" : "b2");
    UserHistory h(many, *cat);
    CHECK(h.size() == UserHistory::kMaxLength);
    CHECK(h.items().back() == "d1");
    CHECK_THROWS_AS(Command::make("   ", 1), PreconditionError);
}
