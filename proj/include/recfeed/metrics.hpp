#pragma once

#include "recfeed/catalog.hpp"

#include <optional>
#include <string>
#include <vector>

namespace recfeed {

// ranking: item ids, best first. N >= 1 or PreconditionError.
double recall_at(const std::vector<std::string>& ranking, const std::string& target, std::size_t n);
double ndcg_at(const std::vector<std::string>& ranking, const std::string& target, std::size_t n);

// Mean over the top-N items of the fraction of the target's values on `keys`
// that the item shares (values compared as sets). nullopt when the target has
// no values on those keys.
std::optional<double> csr_at(const std::vector<std::string>& ranking, const Item& target, std::size_t n,
                             const Catalog& catalog, const std::vector<std::string>& keys);

struct SessionOutcome {
    bool passed = false;
    // Round at which the target was delivered; ignored for failures.
    int success_round = 0;
};

double pass_rate(const std::vector<SessionOutcome>& sessions);
// Failures count as t_max + 1.
double avg_rounds(const std::vector<SessionOutcome>& sessions, int t_max);

} // namespace recfeed
