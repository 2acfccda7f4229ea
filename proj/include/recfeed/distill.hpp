#pragma once

#include "recfeed/catalog.hpp"
#include "recfeed/session.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace recfeed {

constexpr const char* kDistillTemplateVersion = "recfeed-distill/1";

struct ParserSample {
    std::string prompt;
    std::string target;
    // Structured input {feed, command, memory} for teacher replay.
    nlohmann::json input;
    std::uint64_t hash = 0;
};

struct PlannerSample {
    std::string prompt;
    std::string target;
    // {state, has_history}
    nlohmann::json input;
    std::uint64_t hash = 0;
};

struct LogShard {
    std::string name;
    std::string content;
};

struct Collection {
    std::vector<ParserSample> parser;
    std::vector<PlannerSample> planner;
    std::size_t corrupt_lines = 0;
    std::size_t degraded_steps = 0;
    std::size_t duplicates = 0;
    // FNV-1a over the readable events in shard-name order, without
    // timestamps and stage timings.
    std::string source_digest;
};

std::string render_planner_prompt(const PreferenceState& state, bool has_history);

// One parser and one planner sample per non-degraded step; corrupt lines are
// counted and skipped; samples deduplicated on the hash of their prompt.
Collection collect(const std::vector<LogShard>& shards, const Catalog& catalog);
std::vector<LogShard> read_log_shards(const std::filesystem::path& path);

// Header line then records ordered by sample hash.
std::string export_mixed(const Collection& collection);
void export_mixed(const Collection& collection, const std::filesystem::path& path);

struct TeacherReplay {
    std::size_t checked = 0;
    std::vector<std::string> mismatches;
};

// Re-runs each sample's structured input through the rule parser / planner
// rules and compares with the recorded target.
TeacherReplay teacher_replay(const Collection& collection, const ParserBackend& parser);

} // namespace recfeed
