#include "recfeed/parser.hpp"

#include "recfeed/text.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <limits>

namespace recfeed {

namespace {

const std::set<std::string> kNegativeMarkers = {
    "not", "no", "never", "stop", "too", "avoid", "without", "hate", "dislike", "less", "nothing", "none",
    "fewer", "exclude", "excluding", "except", "skip", "remove", "neither", "nor", "dont", "doesnt", "didnt",
    "isnt", "arent", "wont", "cant"};

const std::set<std::string> kPositiveMarkers = {"want", "show", "more", "prefer", "like", "need", "looking",
                                                "love", "find", "give", "get", "include", "add", "seek",
                                                "interested", "wish", "rather"};

const std::set<std::string> kStopwords = {
    "i", "me", "my", "we", "us", "you", "your", "the", "a", "an", "some", "something", "anything", "any", "please",
    "really", "very", "just", "so", "to", "of", "for", "with", "and", "or", "it", "its", "this", "that", "these",
    "those", "is", "are", "was", "were", "be", "am", "ones", "one", "items", "item", "stuff", "things", "thing",
    "options", "option", "could", "would", "can", "will", "should", "maybe", "hmm", "well", "um", "uh", "also",
    "all", "in", "on", "at", "by", "from", "as", "what", "which", "there", "here", "them", "they", "their", "kind",
    "sort", "bit", "lot", "much", "quite", "now", "then", "still", "again", "about", "see", "look", "looks", "let",
    "lets", "have", "has", "had", "do", "does", "did", "been", "being", "im", "id", "ive", "s", "t", "m", "d",
    "ll", "re", "ve", "instead", "longer", "anymore", "actually", "okay", "ok", "than", "but", "those", "other",
    "others", "same", "such", "how", "if", "else", "too", "else", "yet", "though", "fan", "time", "current"};

const std::set<std::string> kSatisfaction = {"great", "perfect", "awesome", "thanks", "thank", "nice", "good",
                                             "ok", "okay", "fine", "exactly", "excellent", "wonderful", "amazing",
                                             "cool", "satisfied", "done"};

const std::array<const char*, 6> kChangePhrases = {"instead of", "rather than", "no longer", "different from before",
                                                   "changed my mind", "change of plans"};

const std::array<const char*, 10> kOrdinals = {"first", "second", "third", "fourth", "fifth",
                                               "sixth", "seventh", "eighth", "ninth", "tenth"};

const std::set<std::string> kPriceWords = {"price", "cheap", "cheaper", "expensive", "cost", "costs",
                                           "budget", "dollars", "usd", "pricey", "priced"};

bool reserved_token(const std::string& t)
{
    if (kNegativeMarkers.count(t) || kPositiveMarkers.count(t) || kStopwords.count(t) || t == "last")
        return true;
    if (std::find(kOrdinals.begin(), kOrdinals.end(), t) != kOrdinals.end())
        return true;
    return std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string escape_regex(const std::string& s)
{
    static const std::string special = R"(\^$.|?*+()[]{})";
    std::string out;
    for (char c : s) {
        if (special.find(c) != std::string::npos)
            out += '\\';
        out += c;
    }
    return out;
}

void mask(std::string& s, std::size_t begin, std::size_t end)
{
    for (std::size_t i = begin; i < end && i < s.size(); ++i)
        s[i] = ' ';
}

double parse_number(std::string raw)
{
    raw.erase(std::remove_if(raw.begin(), raw.end(), [](char c) { return c == ',' || c == '$' || c == ' '; }),
              raw.end());
    return std::strtod(raw.c_str(), nullptr);
}

std::string replace_all(std::string s, const std::string& from, const std::string& to)
{
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
    return s;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Sentence breaks: ; ! ? newline, and '.' unless it sits between digits.
// The '!' of "!=" is not a break.
std::vector<std::string> split_sentences(const std::string& s)
{
    std::vector<std::string> out;
    std::string cur;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        bool brk = c == ';' || c == '?' || c == '\n' || (c == '!' && (i + 1 >= s.size() || s[i + 1] != '='));
        if (c == '.') {
            bool decimal = i > 0 && i + 1 < s.size() && is_digit(s[i - 1]) && is_digit(s[i + 1]);
            brk = !decimal;
        }
        if (brk) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

// Clause breaks: ',' unless it is a thousands separator, and " but ".
std::vector<std::string> split_clauses(const std::string& sentence)
{
    std::vector<std::string> parts;
    std::string cur;
    for (std::size_t i = 0; i < sentence.size(); ++i) {
        char c = sentence[i];
        if (c == ',') {
            bool thousands = i > 0 && i + 3 < sentence.size() + 0 && is_digit(sentence[i - 1]) &&
                             is_digit(sentence[i + 1]);
            if (!thousands) {
                parts.push_back(cur);
                cur.clear();
                continue;
            }
        }
        cur += c;
    }
    parts.push_back(cur);

    std::vector<std::string> out;
    for (auto& p : parts) {
        std::size_t pos = 0;
        std::string padded = " " + p + " ";
        std::size_t start = 0;
        while ((pos = padded.find(" but ", start)) != std::string::npos) {
            out.push_back(padded.substr(start, pos - start));
            start = pos + 5;
        }
        out.push_back(padded.substr(start));
    }
    return out;
}

struct ComparisonPattern {
    std::regex re;
    Op op;
    bool approximate = false;
};

const std::vector<ComparisonPattern>& comparison_patterns()
{
    static const std::string num = R"(\$?\s?(\d+(?:,\d{3})*(?:\.\d+)?))";
    static const std::vector<ComparisonPattern> patterns = [] {
        std::vector<ComparisonPattern> p;
        auto add = [&](const std::string& re, Op op, bool approx = false) {
            p.push_back({std::regex(re, std::regex::ECMAScript | std::regex::optimize), op, approx});
        };
        add(R"(\bbetween\s+)" + num + R"(\s+(?:and|to)\s+)" + num, Op::between);
        add(R"(\bfrom\s+)" + num + R"(\s+to\s+)" + num, Op::between);
        add(R"(\b(?:no more than|not more than|at most|up to|maximum of|max)\s+)" + num, Op::less_equal);
        add(R"(<=\s*)" + num, Op::less_equal);
        add(R"(\b(?:no less than|not less than|at least|minimum of|min)\s+)" + num, Op::greater_equal);
        add(R"(>=\s*)" + num, Op::greater_equal);
        add(R"(\b(?:under|below|less than|cheaper than|lower than|before)\s+)" + num, Op::less_than);
        add(R"(<\s*)" + num, Op::less_than);
        add(R"(\b(?:over|above|more than|greater than|higher than|after)\s+)" + num, Op::greater_than);
        add(R"(>\s*)" + num, Op::greater_than);
        add(R"(\b(?:around|about|approximately|roughly)\s+)" + num, Op::between, true);
        return p;
    }();
    return patterns;
}

const std::regex& deictic_pattern()
{
    static const std::regex re(
        R"(\b(first|second|third|fourth|fifth|sixth|seventh|eighth|ninth|tenth|last)\b(\s+(?:one|item|option|pick))?|#\s*(\d+))",
        std::regex::ECMAScript | std::regex::optimize);
    return re;
}

} // namespace

CommandGrammar::CommandGrammar(std::shared_ptr<const Catalog> catalog) : catalog_(std::move(catalog))
{
    const auto& schema = catalog_->schema();
    std::vector<std::string> aliases;
    for (const auto& [key, spec] : schema) {
        auto lower = text::to_lower(key);
        auto spaced = replace_all(lower, "_", " ");
        key_alias_[lower] = key;
        key_alias_[spaced] = key;
        aliases.push_back(lower);
        if (spaced != lower)
            aliases.push_back(spaced);
        for (const auto& t : text::tokenize(spaced))
            key_tokens_.insert(t);
        if (spec.kind == ValueKind::number)
            numeric_keys_.push_back(key);
    }
    if (!aliases.empty()) {
        std::sort(aliases.begin(), aliases.end(),
                  [](const std::string& a, const std::string& b) { return a.size() != b.size() ? a.size() > b.size() : a < b; });
        std::string alt;
        for (const auto& a : aliases) {
            if (!alt.empty())
                alt += '|';
            alt += escape_regex(a);
        }
        pair_re_.emplace(R"((?:^|[^a-z0-9_])()" + alt + R"()\s*(!=|:|=)\s*)", std::regex::ECMAScript | std::regex::optimize);
    }

    for (const auto& item : catalog_->items()) {
        for (const auto& [key, values] : item.attributes) {
            const auto* spec = catalog_->spec(key);
            if (!spec || spec->kind != ValueKind::text)
                continue;
            for (const auto& v : values) {
                auto lower = text::to_lower(v.as_text());
                canonical_[key].emplace(text::trim(lower), v.as_text());
                auto tokens = text::tokenize(lower);
                if (tokens.empty() || std::all_of(tokens.begin(), tokens.end(), reserved_token))
                    continue;
                auto gram = text::join(tokens, " ");
                auto& entries = lexicon_[gram];
                bool present = std::any_of(entries.begin(), entries.end(),
                                           [&](const LexEntry& e) { return e.key == key; });
                if (!present)
                    entries.push_back({key, v.as_text()});
                max_ngram_ = std::max(max_ngram_, tokens.size());
            }
        }
    }
}

std::string CommandGrammar::resolve_numeric_key(const std::string& clause, std::size_t begin, std::size_t end) const
{
    if (numeric_keys_.empty())
        return {};
    std::string best;
    std::size_t best_dist = std::numeric_limits<std::size_t>::max();
    for (const auto& [alias, key] : key_alias_) {
        const auto* spec = catalog_->spec(key);
        if (!spec || spec->kind != ValueKind::number)
            continue;
        std::regex re("\\b" + escape_regex(alias) + "\\b");
        for (auto it = std::sregex_iterator(clause.begin(), clause.end(), re); it != std::sregex_iterator(); ++it) {
            auto pos = static_cast<std::size_t>(it->position());
            auto stop = pos + static_cast<std::size_t>(it->length());
            std::size_t dist = stop <= begin ? begin - stop : (pos >= end ? pos - end : 0);
            if (dist < best_dist || (dist == best_dist && key < best)) {
                best_dist = dist;
                best = key;
            }
        }
    }
    if (!best.empty())
        return best;

    auto has_key = [&](const std::string& k) {
        return std::find(numeric_keys_.begin(), numeric_keys_.end(), k) != numeric_keys_.end();
    };
    std::string span = clause.substr(begin, end - begin);
    auto tokens = text::tokenize(clause);
    bool price_cue = span.find('$') != std::string::npos ||
                     std::any_of(tokens.begin(), tokens.end(), [](const std::string& t) { return kPriceWords.count(t) > 0; });
    if (price_cue) {
        if (has_key("price"))
            return "price";
        for (const auto& k : numeric_keys_) {
            auto unit = text::to_lower(catalog_->spec(k)->unit);
            if (unit == "$" || unit == "usd")
                return k;
        }
    }
    auto first = text::tokenize(span);
    if (!first.empty() && (first[0] == "before" || first[0] == "after")) {
        for (const auto& k : numeric_keys_) {
            auto lower = text::to_lower(k);
            if (lower.find("year") != std::string::npos || lower.find("date") != std::string::npos)
                return k;
        }
    }
    if (has_key("price"))
        return "price";
    return numeric_keys_.front();
}

std::vector<AttributeValue> CommandGrammar::parse_pair_values(const std::string& key, const std::string& raw) const
{
    const auto* spec = catalog_->spec(key);
    std::vector<AttributeValue> values;
    auto cleaned = text::trim(raw);
    while (!cleaned.empty() && std::string(".:-'\"").find(cleaned.back()) != std::string::npos)
        cleaned = text::trim(cleaned.substr(0, cleaned.size() - 1));
    if (cleaned.empty())
        return values;

    if (spec->kind == ValueKind::number) {
        static const std::regex num(R"(\$?\s?(\d+(?:,\d{3})*(?:\.\d+)?))");
        std::smatch m;
        if (std::regex_search(cleaned, m, num))
            values.push_back(AttributeValue::number(parse_number(m[1].str()), spec->unit));
        return values;
    }
    if (spec->kind == ValueKind::boolean) {
        auto tokens = text::tokenize(cleaned);
        if (!tokens.empty() && (tokens[0] == "true" || tokens[0] == "yes"))
            values.push_back(AttributeValue::boolean(true));
        else if (!tokens.empty() && (tokens[0] == "false" || tokens[0] == "no"))
            values.push_back(AttributeValue::boolean(false));
        return values;
    }

    auto known = canonical_.find(key);
    auto lookup = [&](const std::string& candidate) -> std::optional<std::string> {
        if (known == canonical_.end())
            return std::nullopt;
        auto it = known->second.find(candidate);
        if (it == known->second.end())
            return std::nullopt;
        return it->second;
    };
    // Longest known prefix of the words, so trailing filler ("zenith ones please") drops off.
    auto resolve = [&](const std::string& part) -> std::string {
        auto words = text::tokenize(part);
        for (std::size_t n = words.size(); n > 0; --n) {
            std::vector<std::string> head(words.begin(), words.begin() + static_cast<std::ptrdiff_t>(n));
            auto joined = text::join(head, " ");
            if (auto hit = lookup(joined))
                return *hit;
        }
        if (auto hit = lookup(text::trim(part)))
            return *hit;
        std::vector<std::string> content;
        for (const auto& w : words) {
            if (!kStopwords.count(w))
                content.push_back(w);
        }
        return text::join(content, " ");
    };

    if (auto hit = lookup(cleaned)) {
        values.push_back(AttributeValue::text(*hit));
        return values;
    }
    std::vector<std::string> parts;
    std::string rest = replace_all(cleaned, " or ", "/");
    std::size_t start = 0, pos;
    while ((pos = rest.find('/', start)) != std::string::npos) {
        parts.push_back(rest.substr(start, pos - start));
        start = pos + 1;
    }
    parts.push_back(rest.substr(start));
    for (const auto& p : parts) {
        auto v = resolve(p);
        if (v.empty())
            continue;
        auto av = AttributeValue::text(v);
        bool dup = std::any_of(values.begin(), values.end(), [&](const AttributeValue& x) { return x.same_value(av); });
        if (!dup)
            values.push_back(std::move(av));
    }
    return values;
}

Polarity CommandGrammar::extract_clause(const std::string& clause, std::optional<Polarity> inherited, const Feed& feed,
                                        int round, std::vector<Constraint>& ordered, Extraction& out) const
{
    std::string work = clause;

    for (const char* tail : {"instead of", "rather than"}) {
        auto pos = work.find(tail);
        if (pos != std::string::npos)
            work.erase(pos);
    }
    for (const char* phrase : {"different from before", "changed my mind", "change of plans", "switch to"}) {
        auto pos = work.find(phrase);
        if (pos != std::string::npos)
            mask(work, pos, pos + std::string(phrase).size());
    }

    // Constraints found in this clause, polarity assigned once the clause's markers are known.
    std::vector<Constraint> found;
    bool has_comparison = false;

    for (const auto& pattern : comparison_patterns()) {
        std::vector<std::pair<std::size_t, std::size_t>> spans;
        const std::string snapshot = work;
        for (auto it = std::sregex_iterator(snapshot.begin(), snapshot.end(), pattern.re); it != std::sregex_iterator();
             ++it) {
            const auto& m = *it;
            auto begin = static_cast<std::size_t>(m.position(0));
            auto end = begin + static_cast<std::size_t>(m.length(0));
            spans.emplace_back(begin, end);
            auto key = resolve_numeric_key(snapshot, begin, end);
            if (key.empty())
                continue;
            Constraint c;
            c.attribute = key;
            c.op = pattern.op;
            c.strictness = Strictness::hard;
            c.source_round = round;
            const auto& unit = catalog_->spec(key)->unit;
            double a = parse_number(m[1].str());
            if (pattern.op == Op::between && !pattern.approximate) {
                double b = parse_number(m[2].str());
                c.values = {AttributeValue::number(std::min(a, b), unit), AttributeValue::number(std::max(a, b), unit)};
            } else if (pattern.approximate) {
                c.values = {AttributeValue::number(a * 0.9, unit), AttributeValue::number(a * 1.1, unit)};
            } else {
                c.values = {AttributeValue::number(a, unit)};
            }
            found.push_back(std::move(c));
            has_comparison = true;
        }
        for (auto [b, e] : spans)
            mask(work, b, e);
    }

    if (pair_re_) {
        struct PairHit {
            std::size_t key_begin, value_begin;
            std::string key;
            bool negated;
        };
        std::vector<PairHit> hits;
        for (auto it = std::sregex_iterator(work.begin(), work.end(), *pair_re_); it != std::sregex_iterator(); ++it) {
            const auto& m = *it;
            auto key_begin = static_cast<std::size_t>(m.position(1));
            auto value_begin = static_cast<std::size_t>(m.position(0) + m.length(0));
            hits.push_back({key_begin, value_begin, key_alias_.at(m[1].str()), m[2].str() == "!="});
        }
        std::vector<std::pair<std::size_t, std::size_t>> spans;
        for (std::size_t i = 0; i < hits.size(); ++i) {
            std::size_t value_end = i + 1 < hits.size() ? hits[i + 1].key_begin : work.size();
            auto raw = work.substr(hits[i].value_begin, value_end - hits[i].value_begin);
            // "a and b: x" style joins belong to the next pair.
            auto trimmed = text::trim(raw);
            for (const char* tail : {" and", " or"}) {
                std::string t(tail);
                if (trimmed.size() >= t.size() && trimmed.compare(trimmed.size() - t.size(), t.size(), t) == 0)
                    trimmed = trimmed.substr(0, trimmed.size() - t.size());
            }
            spans.emplace_back(hits[i].key_begin, value_end);
            const auto* spec = catalog_->spec(hits[i].key);
            auto values = parse_pair_values(hits[i].key, trimmed);
            if (values.empty())
                continue;
            Constraint c;
            c.attribute = hits[i].key;
            c.values = std::move(values);
            c.strictness = spec->hard ? Strictness::hard : Strictness::soft;
            c.source_round = round;
            if (hits[i].negated)
                c.op = Op::excludes;
            else if (spec->kind == ValueKind::text && !spec->hard)
                c.op = Op::contains;
            else
                c.op = Op::equals;
            found.push_back(std::move(c));
        }
        for (auto [b, e] : spans)
            mask(work, b, e);
    }

    {
        std::vector<std::pair<std::size_t, std::size_t>> spans;
        for (auto it = std::sregex_iterator(work.begin(), work.end(), deictic_pattern()); it != std::sregex_iterator();
             ++it) {
            const auto& m = *it;
            std::optional<std::size_t> index;
            if (m[1].matched) {
                auto word = m[1].str();
                if (word == "last") {
                    if (!feed.entries.empty())
                        index = feed.entries.size() - 1;
                } else {
                    auto pos = std::find(kOrdinals.begin(), kOrdinals.end(), word) - kOrdinals.begin();
                    index = static_cast<std::size_t>(pos);
                }
            } else if (m[3].matched) {
                auto n = std::strtoul(m[3].str().c_str(), nullptr, 10);
                if (n >= 1)
                    index = n - 1;
            }
            spans.emplace_back(static_cast<std::size_t>(m.position(0)),
                               static_cast<std::size_t>(m.position(0) + m.length(0)));
            if (!index || *index >= feed.entries.size())
                continue;
            const Item* item = catalog_->find(feed.entries[*index].item_id);
            if (!item)
                continue;
            auto collect = [&](bool soft_only) {
                std::vector<Constraint> cs;
                for (const auto& [key, values] : item->attributes) {
                    const auto* spec = catalog_->spec(key);
                    if (!spec || spec->kind != ValueKind::text || (soft_only && spec->hard))
                        continue;
                    for (const auto& v : values)
                        cs.push_back(Constraint{key, Op::contains, {v}, Strictness::soft, Polarity::positive, round});
                }
                return cs;
            };
            auto cs = collect(true);
            if (cs.empty())
                cs = collect(false);
            found.insert(found.end(), cs.begin(), cs.end());
        }
        for (auto [b, e] : spans)
            mask(work, b, e);
    }

    auto tokens = text::tokenize(work);
    bool neg = std::any_of(tokens.begin(), tokens.end(), [](const std::string& t) { return kNegativeMarkers.count(t) > 0; });
    bool pos = std::any_of(tokens.begin(), tokens.end(), [](const std::string& t) { return kPositiveMarkers.count(t) > 0; });
    Polarity polarity = Polarity::positive;
    if (neg)
        polarity = Polarity::negative;
    else if (pos || has_comparison)
        polarity = Polarity::positive;
    else if (inherited)
        polarity = *inherited;

    // Bare catalog values, longest n-gram first.
    std::vector<bool> consumed(tokens.size(), false);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (consumed[i])
            continue;
        for (std::size_t n = std::min(max_ngram_, tokens.size() - i); n > 0; --n) {
            std::vector<std::string> gram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                          tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
            auto it = lexicon_.find(text::join(gram, " "));
            if (it == lexicon_.end())
                continue;
            std::vector<LexEntry> entries = it->second;
            // A key named in the clause disambiguates values shared across attributes.
            std::vector<LexEntry> named;
            for (const auto& e : entries) {
                auto key_words = text::tokenize(replace_all(text::to_lower(e.key), "_", " "));
                bool mentioned = std::all_of(key_words.begin(), key_words.end(), [&](const std::string& w) {
                    return std::find(tokens.begin(), tokens.end(), w) != tokens.end();
                });
                if (mentioned)
                    named.push_back(e);
            }
            if (!named.empty())
                entries = named;
            for (const auto& e : entries) {
                found.push_back(Constraint{e.key, Op::contains, {AttributeValue::text(e.value)}, Strictness::soft,
                                           Polarity::positive, round});
            }
            for (std::size_t k = i; k < i + n; ++k)
                consumed[k] = true;
            break;
        }
    }

    if (!found.empty()) {
        for (auto& c : found) {
            c.polarity = polarity;
            ordered.push_back(std::move(c));
        }
        return polarity;
    }

    std::vector<std::string> content;
    bool satisfied_cue = false;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& t = tokens[i];
        if (kSatisfaction.count(t))
            satisfied_cue = true;
        if ((t == "love" || t == "like") && i + 1 < tokens.size() &&
            (tokens[i + 1] == "this" || tokens[i + 1] == "it" || tokens[i + 1] == "these" || tokens[i + 1] == "that"))
            satisfied_cue = true;
        if (kNegativeMarkers.count(t) || kPositiveMarkers.count(t) || kStopwords.count(t) || key_tokens_.count(t) ||
            kSatisfaction.count(t))
            continue;
        if (std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; }))
            continue;
        content.push_back(t);
    }
    if (satisfied_cue && !neg)
        return polarity;
    if (!content.empty()) {
        auto phrase = text::join(content, " ");
        (polarity == Polarity::positive ? out.free_text_positive : out.free_text_negative).push_back(phrase);
    }
    return polarity;
}

Extraction CommandGrammar::extract(const Command& command, const Feed& feed) const
{
    auto lowered = text::to_lower(command.text);
    lowered = replace_all(lowered, "\xE2\x80\x99", "'");
    lowered = replace_all(lowered, "n't", " not");

    Extraction out;
    for (const char* phrase : kChangePhrases) {
        if (lowered.find(phrase) != std::string::npos)
            out.change_marker = true;
    }
    {
        auto tokens = text::tokenize(lowered);
        if (std::find(tokens.begin(), tokens.end(), "instead") != tokens.end() ||
            std::find(tokens.begin(), tokens.end(), "anymore") != tokens.end())
            out.change_marker = true;
    }

    std::vector<Constraint> ordered;
    for (const auto& sentence : split_sentences(lowered)) {
        std::optional<Polarity> inherited;
        for (const auto& clause : split_clauses(sentence)) {
            if (text::trim(clause).empty())
                continue;
            inherited = extract_clause(clause, inherited, feed, command.round, ordered, out);
        }
    }
    resolve_in_order(ordered);
    for (auto& c : ordered)
        (c.polarity == Polarity::positive ? out.positive : out.negative).push_back(std::move(c));
    normalize(out);
    return out;
}

} // namespace recfeed
