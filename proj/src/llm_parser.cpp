#include "recfeed/llm_parser.hpp"

#include "recfeed/error.hpp"
#include "recfeed/json_io.hpp"

#include <algorithm>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace recfeed {

using nlohmann::json;

HttpLlmClient::HttpLlmClient(std::string endpoint, std::string model, double timeout_seconds)
    : endpoint_(std::move(endpoint)), model_(std::move(model)), timeout_seconds_(timeout_seconds)
{
    auto scheme = endpoint_.find("://");
    if (scheme == std::string::npos)
        throw ConfigError("LLM endpoint must be an http(s) URL: " + endpoint_);
    auto slash = endpoint_.find('/', scheme + 3);
    base_ = slash == std::string::npos ? endpoint_ : endpoint_.substr(0, slash);
    path_ = slash == std::string::npos ? "/v1/chat/completions" : endpoint_.substr(slash);
}

std::string HttpLlmClient::complete(const std::string& system, const std::string& user) const
{
    httplib::Client client(base_);
    auto secs = static_cast<time_t>(timeout_seconds_);
    client.set_connection_timeout(secs, 0);
    client.set_read_timeout(secs, 0);

    json body = {{"model", model_},
                 {"temperature", 0},
                 {"messages", json::array({{{"role", "system"}, {"content", system}}, {{"role", "user"}, {"content", user}}})}};
    auto res = client.Post(path_, body.dump(), "application/json");
    if (!res)
        throw TransportError(endpoint_, "unreachable (" + httplib::to_string(res.error()) + ")");
    if (res->status != 200)
        throw TransportError(endpoint_, "HTTP " + std::to_string(res->status), res->body);
    try {
        auto j = json::parse(res->body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw TransportError(endpoint_, std::string("malformed completion: ") + e.what(), res->body);
    }
}

std::string parser_system_prompt(const Catalog& catalog)
{
    json schema = json::object();
    for (const auto& [key, spec] : catalog.schema())
        schema[key] = {{"kind", to_string(spec.kind)}, {"hard", spec.hard}};
    std::string s;
    s += "You maintain a shopper's structured preference state for a recommendation feed.\n";
    s += "Given the current feed, the shopper's command and the current state, return the next state.\n";
    s += "Keep every earlier preference unless the command contradicts it; when it does, replace only the\n";
    s += "contradicted entries. If the command only expresses satisfaction, return the state unchanged.\n";
    s += "Constraint ops: equals, contains, less_than, less_equal, greater_than, greater_equal, between, excludes.\n";
    s += "Hard constraints are strict rules (price limits, required brands); soft ones are inclinations.\n";
    s += "Answer with one JSON object and nothing else:\n";
    s += R"({"preference_state": {"positive_hard": [], "positive_soft": [], "negative_hard": [], "negative_soft": [], )";
    s += R"("free_text_positive": [], "free_text_negative": []}, "feedback_class": {"kind": "satisfied|compatible|conflicting", "conflict_keys": []}})";
    s += "\nEach constraint: {\"attribute\", \"op\", \"values\", \"strictness\", \"polarity\", \"source_round\"}.\n";
    s += "Attribute schema: " + schema.dump() + "\n";
    return s;
}

std::string render_parser_prompt(const Catalog& catalog, const Feed& feed, const Command& command,
                                 const PreferenceState& memory)
{
    std::string s = "Feed (round " + std::to_string(feed.round) + "):\n";
    for (std::size_t i = 0; i < feed.entries.size(); ++i) {
        const Item* item = catalog.find(feed.entries[i].item_id);
        s += std::to_string(i + 1) + ". [" + feed.entries[i].item_id + "] ";
        s += item ? render_item_text(*item) : std::string("(unknown item)");
        s += "\n";
    }
    s += "Command (round " + std::to_string(command.round) + "): " + command.text + "\n";
    s += "Current state: " + serialize(memory) + "\n";
    return s;
}

namespace {

std::string strip_to_object(const std::string& response)
{
    auto open = response.find('{');
    auto close = response.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw PreconditionError("response contains no JSON object");
    return response.substr(open, close - open + 1);
}

std::vector<std::string> string_list(const json& j, const char* key)
{
    std::vector<std::string> out;
    if (!j.contains(key))
        return out;
    for (const auto& v : j.at(key)) {
        if (v.is_string() && !v.get<std::string>().empty())
            out.push_back(v.get<std::string>());
    }
    return out;
}

} // namespace

DecodedParse decode_parser_response(const std::string& response, const Catalog& catalog, const PreferenceState& memory)
{
    json j;
    try {
        j = json::parse(strip_to_object(response));
    } catch (const json::exception& e) {
        throw PreconditionError(std::string("response is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("preference_state") || !j.contains("feedback_class"))
        throw PreconditionError("response lacks preference_state or feedback_class");

    DecodedParse out;
    try {
        out.feedback = j.at("feedback_class").get<FeedbackClass>();
    } catch (const std::exception& e) {
        throw PreconditionError(std::string("invalid feedback_class: ") + e.what());
    }
    if (out.feedback.kind == FeedbackKind::conflicting && out.feedback.conflict_keys.empty())
        throw PreconditionError("conflicting feedback without conflict keys");
    if (out.feedback.kind != FeedbackKind::conflicting)
        out.feedback.conflict_keys.clear();
    std::sort(out.feedback.conflict_keys.begin(), out.feedback.conflict_keys.end());
    out.feedback.conflict_keys.erase(std::unique(out.feedback.conflict_keys.begin(), out.feedback.conflict_keys.end()),
                                     out.feedback.conflict_keys.end());

    if (out.feedback.kind == FeedbackKind::satisfied) {
        out.state = memory;
        return out;
    }

    const auto& ps = j.at("preference_state");
    if (!ps.is_object())
        throw PreconditionError("preference_state is not an object");

    // Records are re-bucketed by their own polarity and strictness; anything
    // the schema cannot evaluate is dropped rather than trusted.
    std::vector<Constraint> ordered;
    for (const char* bucket : {"positive_hard", "positive_soft", "negative_hard", "negative_soft"}) {
        if (!ps.contains(bucket) || !ps.at(bucket).is_array())
            continue;
        for (const auto& rec : ps.at(bucket)) {
            Constraint c;
            try {
                c = rec.get<Constraint>();
            } catch (const std::exception&) {
                continue;
            }
            const auto* spec = catalog.spec(c.attribute);
            if (!spec || !validate(c).empty())
                continue;
            if (!is_range_op(c.op) && c.op != Op::contains) {
                bool kinds_match = std::all_of(c.values.begin(), c.values.end(), [&](const AttributeValue& v) {
                    return v.kind() == spec->kind;
                });
                if (!kinds_match)
                    continue;
            }
            ordered.push_back(std::move(c));
        }
    }
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const Constraint& a, const Constraint& b) { return a.source_round < b.source_round; });
    resolve_in_order(ordered);
    for (auto& c : ordered)
        out.state.bucket(c.polarity, c.strictness).push_back(std::move(c));
    out.state.free_text_positive = string_list(ps, "free_text_positive");
    out.state.free_text_negative = string_list(ps, "free_text_negative");
    auto& pos = out.state.free_text_positive;
    const auto& neg = out.state.free_text_negative;
    pos.erase(std::remove_if(pos.begin(), pos.end(),
                             [&](const std::string& p) { return std::find(neg.begin(), neg.end(), p) != neg.end(); }),
              pos.end());
    out.state.canonicalize();

    auto problems = validate(out.state);
    if (!problems.empty())
        throw PreconditionError("state violates invariants: " + problems.front());
    return out;
}

LlmParser::LlmParser(std::shared_ptr<const Catalog> catalog, std::shared_ptr<const LlmClient> client)
    : catalog_(std::move(catalog)), client_(std::move(client))
{
    if (!catalog_ || !client_)
        throw ConfigError("LLM parser needs a catalog and a client");
}

ParseOutcome LlmParser::parse(const Feed& feed, const Command& command, const PreferenceState& memory) const
{
    auto system = parser_system_prompt(*catalog_);
    auto user = render_parser_prompt(*catalog_, feed, command, memory);

    ParseOutcome outcome;
    outcome.raw_response = client_->complete(system, user);
    try {
        auto decoded = decode_parser_response(outcome.raw_response, *catalog_, memory);
        outcome.state = std::move(decoded.state);
        outcome.feedback = std::move(decoded.feedback);
        return outcome;
    } catch (const PreconditionError& first) {
        auto repair = user + "\nYour previous answer was rejected (" + first.what() + "):\n" + outcome.raw_response +
                      "\nReply again with a single valid JSON object.\n";
        outcome.raw_response = client_->complete(system, repair);
        try {
            auto decoded = decode_parser_response(outcome.raw_response, *catalog_, memory);
            outcome.state = std::move(decoded.state);
            outcome.feedback = std::move(decoded.feedback);
            return outcome;
        } catch (const PreconditionError&) {
            outcome.state = memory;
            outcome.feedback = FeedbackClass{};
            outcome.degraded = true;
            return outcome;
        }
    }
}

} // namespace recfeed
