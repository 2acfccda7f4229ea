#pragma once

#include "recfeed/parser.hpp"

#include <memory>
#include <string>

namespace recfeed {

/**
 * Minimal chat-completion client: one system and one user message in,
 * the assistant's text out. Throws TransportError on network or HTTP failure.
 */
class LlmClient {
public:
    virtual ~LlmClient() = default;

    virtual std::string complete(const std::string& system, const std::string& user) const = 0;
    virtual std::string endpoint() const = 0;
};

// OpenAI-compatible /chat/completions endpoint.
class HttpLlmClient final : public LlmClient {
public:
    HttpLlmClient(std::string endpoint, std::string model, double timeout_seconds = 30.0);

    std::string complete(const std::string& system, const std::string& user) const override;
    std::string endpoint() const override { return endpoint_; }

private:
    std::string endpoint_;
    std::string base_;
    std::string path_;
    std::string model_;
    double timeout_seconds_;
};

constexpr const char* kParserPromptVersion = "recfeed-parser-prompt/1";

std::string parser_system_prompt(const Catalog& catalog);
std::string render_parser_prompt(const Catalog& catalog, const Feed& feed, const Command& command,
                                 const PreferenceState& memory);

struct DecodedParse {
    PreferenceState state;
    FeedbackClass feedback;
};

// Validates and re-normalizes a model response against the catalog schema.
// Constraints that fail validation are dropped; a structurally unusable
// response throws PreconditionError with the reason.
DecodedParse decode_parser_response(const std::string& response, const Catalog& catalog,
                                    const PreferenceState& memory);

class LlmParser final : public ParserBackend {
public:
    LlmParser(std::shared_ptr<const Catalog> catalog, std::shared_ptr<const LlmClient> client);

    std::string name() const override { return "llm"; }
    ParseOutcome parse(const Feed& feed, const Command& command, const PreferenceState& memory) const override;

private:
    std::shared_ptr<const Catalog> catalog_;
    std::shared_ptr<const LlmClient> client_;
};

} // namespace recfeed
