#include "recfeed/json_io.hpp"

#include "recfeed/error.hpp"

#include <nlohmann/json.hpp>

namespace recfeed {

using nlohmann::json;

void to_json(json& j, const AttributeValue& v)
{
    switch (v.kind()) {
    case ValueKind::text: j = v.as_text(); break;
    case ValueKind::boolean: j = v.as_boolean(); break;
    case ValueKind::number:
        if (v.unit().empty())
            j = v.as_number();
        else
            j = json{{"value", v.as_number()}, {"unit", v.unit()}};
        break;
    }
}

void from_json(const json& j, AttributeValue& v)
{
    if (j.is_string())
        v = AttributeValue::text(j.get<std::string>());
    else if (j.is_boolean())
        v = AttributeValue::boolean(j.get<bool>());
    else if (j.is_number())
        v = AttributeValue::number(j.get<double>());
    else if (j.is_object() && j.contains("value") && j["value"].is_number())
        v = AttributeValue::number(j["value"].get<double>(), j.value("unit", std::string{}));
    else
        throw PreconditionError("invalid attribute value " + j.dump());
}

namespace {

template <typename E, typename Parse>
E parse_enum(const json& j, const char* field, Parse parse)
{
    auto name = j.at(field).get<std::string>();
    auto v = parse(name);
    if (!v)
        throw PreconditionError(std::string("invalid ") + field + " '" + name + "'");
    return *v;
}

} // namespace

void to_json(json& j, const Constraint& c)
{
    j = json{{"attribute", c.attribute},
             {"op", to_string(c.op)},
             {"values", c.values},
             {"strictness", to_string(c.strictness)},
             {"polarity", to_string(c.polarity)},
             {"source_round", c.source_round}};
}

void from_json(const json& j, Constraint& c)
{
    c.attribute = j.at("attribute").get<std::string>();
    c.op = parse_enum<Op>(j, "op", parse_op);
    c.values = j.at("values").get<std::vector<AttributeValue>>();
    c.strictness = parse_enum<Strictness>(j, "strictness", parse_strictness);
    c.polarity = parse_enum<Polarity>(j, "polarity", parse_polarity);
    c.source_round = j.value("source_round", 0);
}

void to_json(json& j, const PreferenceState& s)
{
    j = json{{"positive_hard", s.positive_hard},
             {"positive_soft", s.positive_soft},
             {"negative_hard", s.negative_hard},
             {"negative_soft", s.negative_soft},
             {"free_text_positive", s.free_text_positive},
             {"free_text_negative", s.free_text_negative}};
}

void from_json(const json& j, PreferenceState& s)
{
    auto list = [&](const char* key) {
        return j.contains(key) ? j.at(key).get<std::vector<Constraint>>() : std::vector<Constraint>{};
    };
    auto phrases = [&](const char* key) {
        return j.contains(key) ? j.at(key).get<std::vector<std::string>>() : std::vector<std::string>{};
    };
    s.positive_hard = list("positive_hard");
    s.positive_soft = list("positive_soft");
    s.negative_hard = list("negative_hard");
    s.negative_soft = list("negative_soft");
    s.free_text_positive = phrases("free_text_positive");
    s.free_text_negative = phrases("free_text_negative");
}

void to_json(json& j, const FeedbackClass& f)
{
    j = json{{"kind", to_string(f.kind)}, {"conflict_keys", f.conflict_keys}};
}

void from_json(const json& j, FeedbackClass& f)
{
    f.kind = parse_enum<FeedbackKind>(j, "kind", parse_feedback_kind);
    f.conflict_keys = j.contains("conflict_keys") ? j.at("conflict_keys").get<std::vector<std::string>>()
                                                  : std::vector<std::string>{};
}

void to_json(json& j, const ScoreBreakdown& s)
{
    j = json{{"s_sem", s.s_sem},
             {"s_aia", s.s_aia},
             {"s_aia_raw", s.s_aia_raw},
             {"s_match", s.s_match},
             {"s_atten", s.s_atten},
             {"s_final", s.s_final},
             {"filtered_out", s.filtered_out},
             {"semantic_skipped", s.semantic_skipped},
             {"aia_skipped", s.aia_skipped}};
}

void from_json(const json& j, ScoreBreakdown& s)
{
    s.s_sem = j.at("s_sem").get<double>();
    s.s_aia = j.at("s_aia").get<double>();
    s.s_aia_raw = j.value("s_aia_raw", 0.0);
    s.s_match = j.at("s_match").get<double>();
    s.s_atten = j.at("s_atten").get<double>();
    s.s_final = j.at("s_final").get<double>();
    s.filtered_out = j.value("filtered_out", false);
    s.semantic_skipped = j.value("semantic_skipped", true);
    s.aia_skipped = j.value("aia_skipped", true);
}

void to_json(json& j, const FeedEntry& e)
{
    j = json{{"item_id", e.item_id}, {"score", e.score}};
}

void from_json(const json& j, FeedEntry& e)
{
    e.item_id = j.at("item_id").get<std::string>();
    e.score = j.at("score").get<ScoreBreakdown>();
}

void to_json(json& j, const Feed& f)
{
    j = json{{"round", f.round}, {"k", f.k}, {"entries", f.entries}};
}

void from_json(const json& j, Feed& f)
{
    f.round = j.at("round").get<int>();
    f.k = j.at("k").get<int>();
    f.entries = j.at("entries").get<std::vector<FeedEntry>>();
}

void to_json(json& j, const Command& c)
{
    j = json{{"text", c.text}, {"round", c.round}};
}

void from_json(const json& j, Command& c)
{
    c.text = j.at("text").get<std::string>();
    c.round = j.value("round", 0);
}

std::string serialize(const PreferenceState& s)
{
    return json(s).dump();
}

std::string serialize(const Feed& f)
{
    return json(f).dump();
}

} // namespace recfeed
