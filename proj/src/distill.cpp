#include "recfeed/distill.hpp"

#include "recfeed/error.hpp"
#include "recfeed/json_io.hpp"
#include "recfeed/llm_parser.hpp"
#include "recfeed/text.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace recfeed {

using nlohmann::json;

std::string render_planner_prompt(const PreferenceState& state, bool has_history)
{
    std::string s = "Tools:\n";
    for (const auto& t : tool_registry())
        s += "- " + t.name + "(" + text::join(t.inputs, ", ") + ") -> " + t.output + ": " + t.description + "\n";
    s += "Preference state: " + serialize(state) + "\n";
    s += std::string("Interaction history: ") + (has_history ? "non-empty" : "empty") + "\n";
    s += "Return the tool chain as ordered stage groups.\n";
    return s;
}

namespace {

std::uint64_t sample_hash(const std::string& task, const std::string& prompt)
{
    return text::fnv1a64(task + "\n" + prompt);
}

} // namespace

std::vector<LogShard> read_log_shards(const std::filesystem::path& path)
{
    std::vector<std::filesystem::path> files;
    if (std::filesystem::is_directory(path)) {
        for (const auto& entry : std::filesystem::directory_iterator(path)) {
            if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
                files.push_back(entry.path());
        }
    } else if (std::filesystem::is_regular_file(path)) {
        files.push_back(path);
    } else {
        throw PreconditionError("no session logs at " + path.string());
    }
    std::sort(files.begin(), files.end());
    std::vector<LogShard> shards;
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        if (!in)
            throw PreconditionError("cannot read " + f.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        shards.push_back({f.filename().string(), ss.str()});
    }
    return shards;
}

Collection collect(const std::vector<LogShard>& shards_in, const Catalog& catalog)
{
    auto shards = shards_in;
    std::sort(shards.begin(), shards.end(), [](const LogShard& a, const LogShard& b) { return a.name < b.name; });

    Collection out;
    std::uint64_t digest = text::kFnvOffset;
    std::set<std::uint64_t> seen_parser, seen_planner;

    for (const auto& shard : shards) {
        std::istringstream in(shard.content);
        auto log = read_event_log(in);
        out.corrupt_lines += log.corrupt;
        digest = text::fnv1a64(shard.name + "\n", digest);
        for (const auto& e : log.events) {
            json stable = {{"kind", e.kind}, {"round", e.round}, {"payload", e.payload}};
            if (stable["payload"].contains("trace"))
                stable["payload"]["trace"].erase("stage_ms");
            digest = text::fnv1a64(stable.dump() + "\n", digest);
        }

        // Walk each session in the shard; a created event starts a new one.
        std::optional<json> prev_feed;
        std::optional<json> prev_memory;
        bool has_history = false;
        // Only the rule planner's chains are targets worth imitating.
        bool rule_planner = true;
        std::optional<Command> pending;
        for (const auto& e : log.events) {
            try {
                if (e.kind == "created") {
                    has_history = !e.payload.at("history").empty();
                    rule_planner = e.payload.value("planner", "full") == "full";
                    prev_feed.reset();
                    prev_memory.reset();
                    pending.reset();
                } else if (e.kind == "command") {
                    pending = Command{e.payload.at("text").get<std::string>(), e.payload.at("round").get<int>()};
                } else if (e.kind == "feed") {
                    if (pending && prev_feed && prev_memory) {
                        if (e.payload.value("degraded", false)) {
                            ++out.degraded_steps;
                        } else {
                            auto feed = prev_feed->get<Feed>();
                            auto memory = prev_memory->get<PreferenceState>();
                            auto next = e.payload.at("memory").get<PreferenceState>();

                            ParserSample ps;
                            ps.prompt = render_parser_prompt(catalog, feed, *pending, memory);
                            ps.target = serialize(next);
                            ps.input = {{"feed", *prev_feed}, {"command", *pending}, {"memory", *prev_memory}};
                            ps.hash = sample_hash("parser", ps.prompt);
                            if (seen_parser.insert(ps.hash).second)
                                out.parser.push_back(std::move(ps));
                            else
                                ++out.duplicates;

                            if (!rule_planner) {
                                pending.reset();
                                prev_feed = e.payload.at("feed");
                                prev_memory = e.payload.at("memory");
                                continue;
                            }
                            PlannerSample pl;
                            pl.prompt = render_planner_prompt(next, has_history);
                            pl.target = to_json(chain_from_json(e.payload.at("chain"))).dump();
                            pl.input = {{"state", e.payload.at("memory")}, {"has_history", has_history}};
                            pl.hash = sample_hash("planner", pl.prompt);
                            if (seen_planner.insert(pl.hash).second)
                                out.planner.push_back(std::move(pl));
                            else
                                ++out.duplicates;
                        }
                    }
                    pending.reset();
                    prev_feed = e.payload.at("feed");
                    prev_memory = e.payload.at("memory");
                }
            } catch (const std::exception&) {
                ++out.corrupt_lines;
            }
        }
    }
    out.source_digest = text::hex64(digest);
    return out;
}

std::string export_mixed(const Collection& collection)
{
    if (collection.parser.empty() && collection.planner.empty())
        throw PreconditionError("nothing to export");

    struct Row {
        std::uint64_t hash;
        std::string task;
        json record;
    };
    std::vector<Row> rows;
    for (const auto& s : collection.parser)
        rows.push_back({s.hash, "parser",
                        {{"task", "parser"}, {"prompt", s.prompt}, {"target", s.target},
                         {"meta", {{"hash", text::hex64(s.hash)}, {"input", s.input}}}}});
    for (const auto& s : collection.planner)
        rows.push_back({s.hash, "planner",
                        {{"task", "planner"}, {"prompt", s.prompt}, {"target", s.target},
                         {"meta", {{"hash", text::hex64(s.hash)}, {"input", s.input}}}}});
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return a.hash != b.hash ? a.hash < b.hash : a.task < b.task;
    });

    json header = {{"header",
                    {{"template_version", kDistillTemplateVersion},
                     {"parser_prompt_version", kParserPromptVersion},
                     {"grammar_version", CommandGrammar::kVersion},
                     {"source_digest", collection.source_digest},
                     {"parser_samples", collection.parser.size()},
                     {"planner_samples", collection.planner.size()}}}};
    std::string out = header.dump() + "\n";
    for (const auto& r : rows)
        out += r.record.dump() + "\n";
    return out;
}

void export_mixed(const Collection& collection, const std::filesystem::path& path)
{
    auto body = export_mixed(collection);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw TransportError(path.string(), "cannot open for writing");
    f << body;
    f.flush();
    if (!f)
        throw TransportError(path.string(), "write failed");
}

TeacherReplay teacher_replay(const Collection& collection, const ParserBackend& parser)
{
    TeacherReplay r;
    for (const auto& s : collection.parser) {
        ++r.checked;
        auto feed = s.input.at("feed").get<Feed>();
        auto command = s.input.at("command").get<Command>();
        auto memory = s.input.at("memory").get<PreferenceState>();
        auto outcome = parser.parse(feed, command, memory);
        if (serialize(outcome.state) != s.target)
            r.mismatches.push_back("parser sample " + text::hex64(s.hash));
    }
    for (const auto& s : collection.planner) {
        ++r.checked;
        auto state = s.input.at("state").get<PreferenceState>();
        auto chain = select_tools(state, s.input.at("has_history").get<bool>());
        if (to_json(chain).dump() != s.target)
            r.mismatches.push_back("planner sample " + text::hex64(s.hash));
    }
    return r;
}

} // namespace recfeed
