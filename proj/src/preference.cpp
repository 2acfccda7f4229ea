#include "recfeed/preference.hpp"

#include "recfeed/text.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace recfeed {

const char* to_string(Op op)
{
    switch (op) {
    case Op::equals: return "equals";
    case Op::contains: return "contains";
    case Op::less_than: return "less_than";
    case Op::less_equal: return "less_equal";
    case Op::greater_than: return "greater_than";
    case Op::greater_equal: return "greater_equal";
    case Op::between: return "between";
    case Op::excludes: return "excludes";
    }
    return "equals";
}

const char* to_string(Strictness s) { return s == Strictness::hard ? "hard" : "soft"; }
const char* to_string(Polarity p) { return p == Polarity::positive ? "positive" : "negative"; }

std::optional<Op> parse_op(std::string_view name)
{
    for (Op op : {Op::equals, Op::contains, Op::less_than, Op::less_equal, Op::greater_than, Op::greater_equal,
                  Op::between, Op::excludes}) {
        if (name == to_string(op))
            return op;
    }
    return std::nullopt;
}

std::optional<Strictness> parse_strictness(std::string_view name)
{
    if (name == "hard")
        return Strictness::hard;
    if (name == "soft")
        return Strictness::soft;
    return std::nullopt;
}

std::optional<Polarity> parse_polarity(std::string_view name)
{
    if (name == "positive")
        return Polarity::positive;
    if (name == "negative")
        return Polarity::negative;
    return std::nullopt;
}

bool is_range_op(Op op)
{
    return op == Op::less_than || op == Op::less_equal || op == Op::greater_than || op == Op::greater_equal ||
           op == Op::between;
}

bool same_rule(const Constraint& a, const Constraint& b)
{
    return a.attribute == b.attribute && a.op == b.op && a.values == b.values && a.strictness == b.strictness &&
           a.polarity == b.polarity;
}

namespace {

bool values_less(const std::vector<AttributeValue>& a, const std::vector<AttributeValue>& b)
{
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), value_less);
}

} // namespace

bool constraint_less(const Constraint& a, const Constraint& b)
{
    if (a.attribute != b.attribute)
        return a.attribute < b.attribute;
    if (a.op != b.op)
        return static_cast<int>(a.op) < static_cast<int>(b.op);
    if (a.values != b.values)
        return values_less(a.values, b.values);
    if (a.strictness != b.strictness)
        return static_cast<int>(a.strictness) < static_cast<int>(b.strictness);
    if (a.polarity != b.polarity)
        return static_cast<int>(a.polarity) < static_cast<int>(b.polarity);
    return a.source_round < b.source_round;
}

std::vector<std::string> validate(const Constraint& c)
{
    std::vector<std::string> errors;
    if (c.attribute.empty())
        errors.push_back("constraint attribute is empty");
    if (c.values.empty()) {
        errors.push_back("constraint on '" + c.attribute + "' has no values");
        return errors;
    }
    if (is_range_op(c.op)) {
        for (const auto& v : c.values) {
            if (!v.is_number()) {
                errors.push_back("numeric op " + std::string(to_string(c.op)) + " on '" + c.attribute +
                                 "' needs numeric values");
                return errors;
            }
            if (!std::isfinite(v.as_number()))
                errors.push_back("constraint on '" + c.attribute + "' has a non-finite bound");
        }
        if (c.op == Op::between) {
            if (c.values.size() != 2)
                errors.push_back("between on '" + c.attribute + "' needs exactly 2 values");
            else if (c.values[0].as_number() > c.values[1].as_number())
                errors.push_back("between on '" + c.attribute + "' has low > high");
        } else if (c.values.size() != 1) {
            errors.push_back(std::string(to_string(c.op)) + " on '" + c.attribute + "' needs exactly 1 value");
        }
    }
    return errors;
}

namespace {

bool text_contains(const std::string& haystack, const std::string& needle)
{
    return text::to_lower(haystack).find(text::to_lower(needle)) != std::string::npos;
}

bool any_equal(const std::vector<AttributeValue>& item_values, const std::vector<AttributeValue>& wanted)
{
    for (const auto& iv : item_values) {
        for (const auto& w : wanted) {
            if (iv.same_value(w))
                return true;
        }
    }
    return false;
}

} // namespace

bool Interval::empty() const
{
    if (lo > hi)
        return true;
    return lo == hi && (lo_open || hi_open);
}

bool Interval::contains(const Interval& o) const
{
    if (o.empty())
        return true;
    bool lo_ok = lo < o.lo || (lo == o.lo && (!lo_open || o.lo_open));
    bool hi_ok = hi > o.hi || (hi == o.hi && (!hi_open || o.hi_open));
    return lo_ok && hi_ok;
}

std::optional<Interval> interval_of(const Constraint& c)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (c.values.empty() || !c.values[0].is_number())
        return std::nullopt;
    double v = c.values[0].as_number();
    switch (c.op) {
    case Op::less_than: return Interval{-inf, v, true, true};
    case Op::less_equal: return Interval{-inf, v, true, false};
    case Op::greater_than: return Interval{v, inf, true, true};
    case Op::greater_equal: return Interval{v, inf, false, true};
    case Op::between:
        if (c.values.size() != 2 || !c.values[1].is_number())
            return std::nullopt;
        return Interval{v, c.values[1].as_number(), false, false};
    case Op::equals:
        if (c.values.size() != 1)
            return std::nullopt;
        return Interval{v, v, false, false};
    default: return std::nullopt;
    }
}

MatchResult evaluate(const Constraint& c, const Item& item)
{
    const auto* values = item.find(c.attribute);
    if (!values)
        return MatchResult::missing;

    auto result = [](bool b) { return b ? MatchResult::holds : MatchResult::fails; };
    switch (c.op) {
    case Op::equals: return result(any_equal(*values, c.values));
    case Op::excludes: return result(!any_equal(*values, c.values));
    case Op::contains:
        for (const auto& iv : *values) {
            for (const auto& w : c.values) {
                if (iv.is_text() && w.is_text() ? text_contains(iv.as_text(), w.as_text()) : iv.same_value(w))
                    return MatchResult::holds;
            }
        }
        return MatchResult::fails;
    default: break;
    }

    auto interval = interval_of(c);
    if (!interval)
        return MatchResult::fails;
    for (const auto& iv : *values) {
        if (!iv.is_number())
            continue;
        double x = iv.as_number();
        bool lo_ok = interval->lo_open ? x > interval->lo : x >= interval->lo;
        bool hi_ok = interval->hi_open ? x < interval->hi : x <= interval->hi;
        if (lo_ok && hi_ok)
            return MatchResult::holds;
    }
    return MatchResult::fails;
}

std::vector<Constraint>& PreferenceState::bucket(Polarity p, Strictness s)
{
    if (p == Polarity::positive)
        return s == Strictness::hard ? positive_hard : positive_soft;
    return s == Strictness::hard ? negative_hard : negative_soft;
}

const std::vector<Constraint>& PreferenceState::bucket(Polarity p, Strictness s) const
{
    return const_cast<PreferenceState*>(this)->bucket(p, s);
}

bool PreferenceState::empty() const
{
    return positive_hard.empty() && positive_soft.empty() && negative_hard.empty() && negative_soft.empty() &&
           free_text_positive.empty() && free_text_negative.empty();
}

std::vector<Constraint> PreferenceState::all_constraints() const
{
    std::vector<Constraint> out;
    for (const auto* b : {&positive_hard, &positive_soft, &negative_hard, &negative_soft})
        out.insert(out.end(), b->begin(), b->end());
    return out;
}

namespace {

void dedup_phrases(std::vector<std::string>& phrases)
{
    std::set<std::string> seen;
    std::vector<std::string> out;
    for (auto& p : phrases) {
        if (seen.insert(p).second)
            out.push_back(std::move(p));
    }
    phrases = std::move(out);
}

} // namespace

void PreferenceState::canonicalize()
{
    for (auto* b : {&positive_hard, &positive_soft, &negative_hard, &negative_soft}) {
        std::sort(b->begin(), b->end(), constraint_less);
        b->erase(std::unique(b->begin(), b->end(), same_rule), b->end());
    }
    dedup_phrases(free_text_positive);
    dedup_phrases(free_text_negative);
}

std::vector<std::string> validate(const PreferenceState& state)
{
    std::vector<std::string> errors;
    for (Polarity p : {Polarity::positive, Polarity::negative}) {
        for (Strictness s : {Strictness::hard, Strictness::soft}) {
            std::map<std::string, int> ranges;
            for (const auto& c : state.bucket(p, s)) {
                if (c.polarity != p || c.strictness != s) {
                    errors.push_back("constraint on '" + c.attribute + "' sits in the wrong bucket");
                }
                for (auto& e : validate(c))
                    errors.push_back(std::move(e));
                if (s == Strictness::hard && is_range_op(c.op) && ++ranges[c.attribute] > 1) {
                    errors.push_back("more than one hard range on '" + c.attribute + "' (" + to_string(p) + ")");
                }
            }
        }
    }
    for (const auto* pos : {&state.positive_hard, &state.positive_soft}) {
        for (const auto* neg : {&state.negative_hard, &state.negative_soft}) {
            for (const auto& a : *pos) {
                for (const auto& b : *neg) {
                    if (a.attribute == b.attribute && a.op == b.op && a.values == b.values)
                        errors.push_back("constraint on '" + a.attribute + "' appears in both polarities");
                }
            }
        }
    }
    return errors;
}

const char* to_string(FeedbackKind k)
{
    switch (k) {
    case FeedbackKind::satisfied: return "satisfied";
    case FeedbackKind::compatible: return "compatible";
    case FeedbackKind::conflicting: return "conflicting";
    }
    return "satisfied";
}

std::optional<FeedbackKind> parse_feedback_kind(std::string_view name)
{
    for (auto k : {FeedbackKind::satisfied, FeedbackKind::compatible, FeedbackKind::conflicting}) {
        if (name == to_string(k))
            return k;
    }
    return std::nullopt;
}

} // namespace recfeed
