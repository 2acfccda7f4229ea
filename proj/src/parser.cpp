#include "recfeed/parser.hpp"

#include <algorithm>
#include <set>

namespace recfeed {

bool Extraction::empty() const
{
    return positive.empty() && negative.empty() && free_text_positive.empty() && free_text_negative.empty();
}

std::vector<Constraint> Extraction::constraints() const
{
    std::vector<Constraint> out = positive;
    out.insert(out.end(), negative.begin(), negative.end());
    return out;
}

namespace {

int effect_sign(const Constraint& c)
{
    bool flips = (c.op == Op::excludes) != (c.polarity == Polarity::negative);
    return flips ? -1 : 1;
}

bool share_value(const Constraint& a, const Constraint& b)
{
    for (const auto& x : a.values) {
        for (const auto& y : b.values) {
            if (x.same_value(y))
                return true;
        }
    }
    return false;
}

bool contains_rule(const std::vector<Constraint>& list, const Constraint& c)
{
    return std::any_of(list.begin(), list.end(), [&](const Constraint& x) { return same_rule(x, c); });
}

void add_phrase(std::vector<std::string>& list, const std::string& phrase)
{
    if (std::find(list.begin(), list.end(), phrase) == list.end())
        list.push_back(phrase);
}

void remove_phrase(std::vector<std::string>& list, const std::string& phrase)
{
    list.erase(std::remove(list.begin(), list.end(), phrase), list.end());
}

} // namespace

bool contradicts(const Constraint& existing, const Constraint& incoming)
{
    if (existing.attribute != incoming.attribute || same_rule(existing, incoming))
        return false;
    bool range_a = is_range_op(existing.op);
    bool range_b = is_range_op(incoming.op);
    if (range_a && range_b) {
        if (existing.polarity == incoming.polarity)
            return true;
        const auto& pos = existing.polarity == Polarity::positive ? existing : incoming;
        const auto& neg = existing.polarity == Polarity::positive ? incoming : existing;
        auto ip = interval_of(pos);
        auto in = interval_of(neg);
        return ip && in && in->contains(*ip);
    }
    if (range_a || range_b)
        return false;
    return share_value(existing, incoming) && effect_sign(existing) != effect_sign(incoming);
}

void resolve_in_order(std::vector<Constraint>& ordered)
{
    std::vector<bool> keep(ordered.size(), true);
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        for (std::size_t j = i + 1; j < ordered.size(); ++j) {
            if (keep[j] && (same_rule(ordered[i], ordered[j]) || contradicts(ordered[i], ordered[j]))) {
                keep[i] = false;
                break;
            }
        }
    }
    std::vector<Constraint> out;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        if (keep[i])
            out.push_back(std::move(ordered[i]));
    }
    ordered = std::move(out);
}

void normalize(Extraction& e)
{
    std::vector<Constraint> all = e.constraints();
    resolve_in_order(all);
    e.positive.clear();
    e.negative.clear();
    for (auto& c : all)
        (c.polarity == Polarity::positive ? e.positive : e.negative).push_back(std::move(c));
    std::vector<std::string> pos;
    for (const auto& p : e.free_text_positive) {
        if (std::find(e.free_text_negative.begin(), e.free_text_negative.end(), p) == e.free_text_negative.end())
            add_phrase(pos, p);
    }
    e.free_text_positive = std::move(pos);
    std::vector<std::string> neg;
    for (const auto& p : e.free_text_negative)
        add_phrase(neg, p);
    e.free_text_negative = std::move(neg);
}

FeedbackClass classify_feedback(const PreferenceState& memory, const Extraction& extraction, const Feed& /*feed*/)
{
    if (extraction.empty())
        return FeedbackClass{FeedbackKind::satisfied, {}};

    std::set<std::string> keys;
    auto existing = memory.all_constraints();
    for (const auto& incoming : extraction.constraints()) {
        for (const auto& m : existing) {
            if (contradicts(m, incoming))
                keys.insert(incoming.attribute);
        }
        if (extraction.change_marker) {
            bool known = std::any_of(existing.begin(), existing.end(),
                                     [&](const Constraint& m) { return m.attribute == incoming.attribute; });
            if (known)
                keys.insert(incoming.attribute);
        }
    }
    if (keys.empty())
        return FeedbackClass{FeedbackKind::compatible, {}};
    return FeedbackClass{FeedbackKind::conflicting, std::vector<std::string>(keys.begin(), keys.end())};
}

PreferenceState consolidate(const PreferenceState& memory, const Extraction& extraction, const FeedbackClass& cls)
{
    if (cls.kind == FeedbackKind::satisfied)
        return memory;

    PreferenceState out = memory;
    auto incoming = extraction.constraints();

    if (cls.kind == FeedbackKind::conflicting) {
        std::set<std::string> keys(cls.conflict_keys.begin(), cls.conflict_keys.end());
        auto resolved = [&](const Constraint& m) {
            if (!keys.count(m.attribute))
                return false;
            for (const auto& e : incoming) {
                if (contradicts(m, e))
                    return true;
            }
            if (!extraction.change_marker)
                return false;
            // A change cue replaces same-direction rules on the key unless restated verbatim.
            bool restated = std::any_of(incoming.begin(), incoming.end(), [&](const Constraint& e) { return same_rule(m, e); });
            bool redirected = std::any_of(incoming.begin(), incoming.end(), [&](const Constraint& e) {
                return e.attribute == m.attribute && e.polarity == m.polarity;
            });
            return redirected && !restated;
        };
        for (auto* b : {&out.positive_hard, &out.positive_soft, &out.negative_hard, &out.negative_soft})
            b->erase(std::remove_if(b->begin(), b->end(), resolved), b->end());
    }

    for (const auto& c : incoming) {
        auto& bucket = out.bucket(c.polarity, c.strictness);
        if (!contains_rule(bucket, c))
            bucket.push_back(c);
    }
    for (const auto& p : extraction.free_text_positive) {
        remove_phrase(out.free_text_negative, p);
        add_phrase(out.free_text_positive, p);
    }
    for (const auto& p : extraction.free_text_negative) {
        remove_phrase(out.free_text_positive, p);
        add_phrase(out.free_text_negative, p);
    }
    out.canonicalize();
    return out;
}

RuleParser::RuleParser(std::shared_ptr<const Catalog> catalog) : grammar_(std::move(catalog)) {}

Extraction RuleParser::extract_signals(const Command& command, const Feed& feed) const
{
    return grammar_.extract(command, feed);
}

ParseOutcome RuleParser::parse(const Feed& feed, const Command& command, const PreferenceState& memory) const
{
    auto extraction = extract_signals(command, feed);
    auto cls = classify_feedback(memory, extraction, feed);
    return ParseOutcome{consolidate(memory, extraction, cls), cls, false, {}};
}

PreferenceState parse_command(const ParserBackend& backend, const Feed& feed, const Command& command,
                              const PreferenceState& memory)
{
    return backend.parse(feed, command, memory).state;
}

} // namespace recfeed
