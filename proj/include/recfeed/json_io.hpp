#pragma once

#include "recfeed/catalog.hpp"
#include "recfeed/feed.hpp"
#include "recfeed/preference.hpp"

#include <nlohmann/json_fwd.hpp>

namespace recfeed {

// Numbers without a unit serialize as plain JSON numbers.
void to_json(nlohmann::json& j, const AttributeValue& v);
void from_json(const nlohmann::json& j, AttributeValue& v);

void to_json(nlohmann::json& j, const Constraint& c);
void from_json(const nlohmann::json& j, Constraint& c);

void to_json(nlohmann::json& j, const PreferenceState& s);
void from_json(const nlohmann::json& j, PreferenceState& s);

void to_json(nlohmann::json& j, const FeedbackClass& f);
void from_json(const nlohmann::json& j, FeedbackClass& f);

void to_json(nlohmann::json& j, const ScoreBreakdown& s);
void from_json(const nlohmann::json& j, ScoreBreakdown& s);

void to_json(nlohmann::json& j, const FeedEntry& e);
void from_json(const nlohmann::json& j, FeedEntry& e);

void to_json(nlohmann::json& j, const Feed& f);
void from_json(const nlohmann::json& j, Feed& f);

void to_json(nlohmann::json& j, const Command& c);
void from_json(const nlohmann::json& j, Command& c);

// Compact dump used wherever byte-identical output matters.
std::string serialize(const PreferenceState& s);
std::string serialize(const Feed& f);

} // namespace recfeed
