#pragma once

#include "recfeed/catalog.hpp"

#include <optional>
#include <string>
#include <vector>

namespace recfeed {

enum class Op { equals, contains, less_than, less_equal, greater_than, greater_equal, between, excludes };
enum class Strictness { hard, soft };
enum class Polarity { positive, negative };

const char* to_string(Op op);
const char* to_string(Strictness s);
const char* to_string(Polarity p);
std::optional<Op> parse_op(std::string_view name);
std::optional<Strictness> parse_strictness(std::string_view name);
std::optional<Polarity> parse_polarity(std::string_view name);

// less_than .. between: ops that describe a numeric interval.
bool is_range_op(Op op);

/**
 * One preference rule on an item attribute.
 *
 * Positive constraints describe what the user wants, negative ones what the
 * user rejects; the predicate (evaluate) is the same for both, the bucket
 * decides how a match is used.
 */
struct Constraint {
    std::string attribute;
    Op op = Op::equals;
    std::vector<AttributeValue> values;
    Strictness strictness = Strictness::soft;
    Polarity polarity = Polarity::positive;
    int source_round = 0;

    bool operator==(const Constraint&) const = default;
};

// Structural identity ignoring the round the constraint was stated in.
bool same_rule(const Constraint& a, const Constraint& b);
// Canonical order: attribute, op, values, strictness, polarity, source_round.
bool constraint_less(const Constraint& a, const Constraint& b);
// Empty when the constraint is well-formed.
std::vector<std::string> validate(const Constraint& c);

enum class MatchResult { holds, fails, missing };

// Multi-valued attributes match when any item value satisfies the op.
// Text compares case-insensitively; contains is a substring test.
MatchResult evaluate(const Constraint& c, const Item& item);

struct Interval {
    double lo;
    double hi;
    bool lo_open;
    bool hi_open;

    bool empty() const;
    bool contains(const Interval& other) const;
};

// Interval of a range op or a numeric equals; nullopt otherwise.
std::optional<Interval> interval_of(const Constraint& c);

/**
 * Structured user model: positive/negative x hard/soft buckets plus soft
 * free-text inclinations that name no schema attribute.
 */
struct PreferenceState {
    std::vector<Constraint> positive_hard;
    std::vector<Constraint> positive_soft;
    std::vector<Constraint> negative_hard;
    std::vector<Constraint> negative_soft;
    std::vector<std::string> free_text_positive;
    std::vector<std::string> free_text_negative;

    std::vector<Constraint>& bucket(Polarity p, Strictness s);
    const std::vector<Constraint>& bucket(Polarity p, Strictness s) const;

    bool empty() const;
    bool has_hard() const { return !positive_hard.empty() || !negative_hard.empty(); }
    bool has_positive_soft() const { return !positive_soft.empty() || !free_text_positive.empty(); }
    bool has_negative_soft() const { return !negative_soft.empty() || !free_text_negative.empty(); }

    std::vector<Constraint> all_constraints() const;

    // Sort every bucket canonically and drop exact duplicates.
    void canonicalize();

    bool operator==(const PreferenceState&) const = default;
};

// Empty when every invariant holds.
std::vector<std::string> validate(const PreferenceState& state);

enum class FeedbackKind { satisfied, compatible, conflicting };

const char* to_string(FeedbackKind k);
std::optional<FeedbackKind> parse_feedback_kind(std::string_view name);

struct FeedbackClass {
    FeedbackKind kind = FeedbackKind::satisfied;
    // Non-empty iff kind == conflicting; sorted ascending.
    std::vector<std::string> conflict_keys;

    bool operator==(const FeedbackClass&) const = default;
};

} // namespace recfeed
