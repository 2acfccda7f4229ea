#include <doctest.h>

#include "fixtures.hpp"
#include "laws.hpp"

using namespace recfeed;
using namespace recfeed::testing;

namespace {

void require_clean(const LawReport& r, std::size_t want)
{
    CHECK(r.checked == want);
    if (!r.violations.empty())
        FAIL_CHECK(r.violations.front());
    CHECK(r.violations.empty());
}

} // namespace

TEST_CASE("preservation law")
{
    require_clean(check_preservation(101, 200), 200);
}

TEST_CASE("integration monotonicity law")
{
    require_clean(check_integration_monotonicity(102, 200), 200);
}

TEST_CASE("integration idempotence law")
{
    require_clean(check_integration_idempotence(103, 200), 200);
}

TEST_CASE("resolution locality law")
{
    require_clean(check_resolution_locality(104, 200), 200);
}

TEST_CASE("random memories satisfy the state invariants")
{
    std::mt19937_64 rng(7);
    for (int i = 0; i < 500; ++i) {
        auto m = random_memory(rng);
        auto problems = validate(m);
        if (!problems.empty())
            FAIL(problems.front());
    }
}

TEST_CASE("resolve_in_order keeps the later of two contradicting rules")
{
    std::vector<Constraint> rules = {
        make_constraint("price", Op::less_than, {num(50)}, Strictness::hard, Polarity::positive, 1),
        make_constraint("price", Op::greater_than, {num(80)}, Strictness::hard, Polarity::positive, 2),
        make_constraint("brand", Op::equals, {txt("coral")}, Strictness::hard, Polarity::positive, 2),
        make_constraint("brand", Op::equals, {txt("coral")}, Strictness::hard, Polarity::positive, 3),
    };
    resolve_in_order(rules);
    REQUIRE(rules.size() == 2);
    CHECK(rules[0].op == Op::greater_than);
    CHECK(rules[1].source_round == 3);
}

TEST_CASE("contradiction rules")
{
    auto pos = [](Op op, std::vector<AttributeValue> v) {
        return make_constraint("price", op, std::move(v), Strictness::hard, Polarity::positive);
    };
    auto neg = [](Op op, std::vector<AttributeValue> v) {
        return make_constraint("price", op, std::move(v), Strictness::hard, Polarity::negative);
    };
    CHECK(contradicts(pos(Op::less_than, {num(50)}), pos(Op::between, {num(100), num(200)})));
    CHECK(contradicts(pos(Op::between, {num(20), num(40)}), neg(Op::less_than, {num(60)})));
    CHECK_FALSE(contradicts(pos(Op::between, {num(20), num(80)}), neg(Op::less_than, {num(30)})));
    CHECK(contradicts(make_constraint("brand", Op::equals, {txt("coral")}),
                      make_constraint("brand", Op::equals, {txt("coral")}, Strictness::hard, Polarity::negative)));
    CHECK_FALSE(contradicts(make_constraint("brand", Op::equals, {txt("coral")}),
                            make_constraint("color", Op::equals, {txt("coral")}, Strictness::hard, Polarity::negative)));
}
