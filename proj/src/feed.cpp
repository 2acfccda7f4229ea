#include "recfeed/feed.hpp"

#include "recfeed/error.hpp"
#include "recfeed/text.hpp"

#include <algorithm>

namespace recfeed {

bool ranks_before(const FeedEntry& a, const FeedEntry& b)
{
    if (a.score.s_final != b.score.s_final)
        return a.score.s_final > b.score.s_final;
    return a.item_id < b.item_id;
}

void sort_entries(std::vector<FeedEntry>& entries)
{
    std::sort(entries.begin(), entries.end(), ranks_before);
}

bool Feed::contains(const std::string& item_id) const
{
    return rank_of(item_id).has_value();
}

std::optional<std::size_t> Feed::rank_of(const std::string& item_id) const
{
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].item_id == item_id)
            return i + 1;
    }
    return std::nullopt;
}

std::vector<std::string> Feed::item_ids() const
{
    std::vector<std::string> ids;
    ids.reserve(entries.size());
    for (const auto& e : entries)
        ids.push_back(e.item_id);
    return ids;
}

UserHistory::UserHistory(std::vector<std::string> item_ids, const Catalog& catalog)
{
    std::vector<std::string> unknown;
    for (const auto& id : item_ids) {
        if (!catalog.find(id))
            unknown.push_back(id);
    }
    if (!unknown.empty())
        throw PreconditionError("unknown history items: " + text::join(unknown, ", "));
    if (item_ids.size() > kMaxLength)
        item_ids.erase(item_ids.begin(), item_ids.end() - static_cast<std::ptrdiff_t>(kMaxLength));
    items_ = std::move(item_ids);
}

Command Command::make(std::string text, int round)
{
    if (text::trim(text).empty())
        throw PreconditionError("command text is empty");
    return Command{std::move(text), round};
}

} // namespace recfeed
