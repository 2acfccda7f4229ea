#pragma once

#include "recfeed/catalog.hpp"
#include "recfeed/feed.hpp"
#include "recfeed/preference.hpp"

#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

namespace recfeed {

/**
 * Signals pulled out of one command before they are merged into memory.
 */
struct Extraction {
    std::vector<Constraint> positive;
    std::vector<Constraint> negative;
    std::vector<std::string> free_text_positive;
    std::vector<std::string> free_text_negative;
    // An explicit change cue ("instead of", "no longer", "different from before", ...).
    bool change_marker = false;

    bool empty() const;
    std::vector<Constraint> constraints() const;

    bool operator==(const Extraction&) const = default;
};

// True when a memory constraint and an incoming one cannot both stand:
// same-polarity numeric ranges on one attribute (the later one resolves the
// earlier), opposite-polarity ranges whose positive interval the negative one
// swallows, or categorical rules that share a value with opposite effect.
bool contradicts(const Constraint& existing, const Constraint& incoming);

// Keeps the later of any two contradicting or identical constraints.
void resolve_in_order(std::vector<Constraint>& ordered);

// resolve_in_order over positives followed by negatives; a phrase present on
// both free-text sides stays only on the negative side.
void normalize(Extraction& extraction);

FeedbackClass classify_feedback(const PreferenceState& memory, const Extraction& extraction, const Feed& feed);

// Preservation / integration / resolution update of the preference memory.
PreferenceState consolidate(const PreferenceState& memory, const Extraction& extraction, const FeedbackClass& cls);

/**
 * Deterministic command grammar over a catalog's schema and value vocabulary.
 * See docs/command-grammar.md.
 */
class CommandGrammar {
public:
    static constexpr const char* kVersion = "recfeed-grammar/1";

    explicit CommandGrammar(std::shared_ptr<const Catalog> catalog);

    Extraction extract(const Command& command, const Feed& feed) const;

    const Catalog& catalog() const { return *catalog_; }

private:
    struct LexEntry {
        std::string key;
        std::string value;
    };

    // Returns the polarity the clause ended up with, for inheritance by the next clause.
    Polarity extract_clause(const std::string& clause, std::optional<Polarity> inherited, const Feed& feed, int round,
                            std::vector<Constraint>& ordered, Extraction& out) const;
    std::string resolve_numeric_key(const std::string& clause, std::size_t begin, std::size_t end) const;
    std::vector<AttributeValue> parse_pair_values(const std::string& key, const std::string& raw) const;

    std::shared_ptr<const Catalog> catalog_;
    std::map<std::string, std::vector<LexEntry>> lexicon_;
    std::map<std::string, std::map<std::string, std::string>> canonical_;
    std::size_t max_ngram_ = 1;
    std::vector<std::string> numeric_keys_;
    std::set<std::string> key_tokens_;
    std::map<std::string, std::string> key_alias_;
    std::optional<std::regex> pair_re_;
};

struct ParseOutcome {
    PreferenceState state;
    FeedbackClass feedback;
    // The backend could not produce a valid record; state equals the input memory.
    bool degraded = false;
    std::string raw_response;
};

/**
 * Maps (feed, command, memory) to the next preference state.
 * Backends are stateless per call.
 */
class ParserBackend {
public:
    virtual ~ParserBackend() = default;

    virtual std::string name() const = 0;
    virtual ParseOutcome parse(const Feed& feed, const Command& command, const PreferenceState& memory) const = 0;
};

class RuleParser final : public ParserBackend {
public:
    explicit RuleParser(std::shared_ptr<const Catalog> catalog);

    std::string name() const override { return "rule"; }
    ParseOutcome parse(const Feed& feed, const Command& command, const PreferenceState& memory) const override;

    Extraction extract_signals(const Command& command, const Feed& feed) const;

private:
    CommandGrammar grammar_;
};

PreferenceState parse_command(const ParserBackend& backend, const Feed& feed, const Command& command,
                              const PreferenceState& memory);

} // namespace recfeed
