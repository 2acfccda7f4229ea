#pragma once

#include "recfeed/catalog.hpp"

#include <optional>
#include <string>
#include <vector>

namespace recfeed {

/**
 * Per-item score components produced by the tool chain.
 *
 * s_match = alpha * s_sem + (1 - alpha) * s_aia when both matcher paths ran,
 * s_final = s_match + s_atten. s_aia holds the pool-standardized value when
 * standardization is enabled; s_aia_raw keeps the unscaled attention score.
 */
struct ScoreBreakdown {
    double s_sem = 0.0;
    double s_aia = 0.0;
    double s_aia_raw = 0.0;
    double s_match = 0.0;
    double s_atten = 0.0;
    double s_final = 0.0;
    bool filtered_out = false;
    bool semantic_skipped = true;
    bool aia_skipped = true;

    bool operator==(const ScoreBreakdown&) const = default;
};

struct FeedEntry {
    std::string item_id;
    ScoreBreakdown score;

    bool operator==(const FeedEntry&) const = default;
};

// Global ranking order: s_final descending, ties by ascending item id.
bool ranks_before(const FeedEntry& a, const FeedEntry& b);
void sort_entries(std::vector<FeedEntry>& entries);

struct Feed {
    int round = 0;
    int k = 0;
    std::vector<FeedEntry> entries;

    bool contains(const std::string& item_id) const;
    // 1-based rank, nullopt when absent.
    std::optional<std::size_t> rank_of(const std::string& item_id) const;
    std::vector<std::string> item_ids() const;

    bool operator==(const Feed&) const = default;
};

/**
 * Chronological interaction history, truncated to the most recent entries.
 */
class UserHistory {
public:
    static constexpr std::size_t kMaxLength = 50;

    UserHistory() = default;
    // Throws PreconditionError listing every id the catalog cannot resolve.
    UserHistory(std::vector<std::string> item_ids, const Catalog& catalog);

    const std::vector<std::string>& items() const { return items_; }
    bool empty() const { return items_.empty(); }
    std::size_t size() const { return items_.size(); }

    bool operator==(const UserHistory&) const = default;

private:
    std::vector<std::string> items_;
};

struct Command {
    std::string text;
    int round = 0;

    // Rejects text that is empty after trimming.
    static Command make(std::string text, int round);

    bool operator==(const Command&) const = default;
};

} // namespace recfeed
