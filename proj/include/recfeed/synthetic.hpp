#pragma once

#include "recfeed/catalog.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace recfeed {

struct SyntheticConfig {
    std::size_t users = 200;
    std::uint64_t seed = 42;
    std::size_t min_history = 10;
    std::size_t max_history = 30;
    std::size_t image_dim = 8;
};

struct SyntheticUser {
    std::string user_id;
    // Chronological interactions; the held-out next item is `target`.
    std::vector<std::string> history;
    std::string target;
};

struct SyntheticBenchmark {
    std::shared_ptr<const Catalog> catalog;
    std::vector<SyntheticUser> users;
};

// 2000 items; every (brand, color, price band) triple occurs exactly once, so
// the three revealed hard attributes identify any target uniquely.
std::shared_ptr<const Catalog> make_synthetic_catalog(std::uint64_t seed, std::size_t image_dim = 8);

SyntheticBenchmark make_synthetic_benchmark(const SyntheticConfig& config);

// Users for an arbitrary catalog: random targets, histories drawn from items
// sharing a soft text attribute value with the target when possible.
std::vector<SyntheticUser> make_users(const Catalog& catalog, const SyntheticConfig& config);

} // namespace recfeed
