#include "recfeed/synthetic.hpp"

#include "recfeed/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <random>

namespace recfeed {

namespace {

constexpr std::array<const char*, 20> kBrands = {"acme",   "zenith",  "orion",  "vertex", "nimbus",
                                                 "solace", "quill",   "ember",  "harbor", "juniper",
                                                 "kestrel", "lumen",  "marlow", "nova",   "osprey",
                                                 "pioneer", "rivet",  "sable",  "tundra", "willow"};
constexpr std::array<const char*, 10> kColors = {"red",  "blue",   "green",  "black",  "white",
                                                 "gray", "yellow", "purple", "orange", "teal"};
constexpr std::array<const char*, 8> kCategories = {"jacket", "sneaker", "backpack", "watch",
                                                    "lamp",   "mug",     "headphones", "blanket"};
constexpr std::array<const char*, 6> kStyles = {"minimalist", "vintage", "sporty", "classic", "rustic", "modern"};

constexpr std::size_t kBands = 10;
constexpr double kBandWidth = 20.0;
constexpr double kBasePrice = 20.0;

std::size_t pick(std::mt19937_64& rng, std::size_t n)
{
    return static_cast<std::size_t>(rng() % n);
}

double unit(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string item_id(std::size_t i)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "p%04zu", i);
    return buf;
}

std::string capitalize(std::string s)
{
    if (!s.empty() && s[0] >= 'a' && s[0] <= 'z')
        s[0] = static_cast<char>(s[0] - 'a' + 'A');
    return s;
}

} // namespace

std::shared_ptr<const Catalog> make_synthetic_catalog(std::uint64_t seed, std::size_t image_dim)
{
    Schema schema;
    schema["brand"] = AttributeSpec{ValueKind::text, true, true, true, std::nullopt, ""};
    schema["color"] = AttributeSpec{ValueKind::text, true, true, true, std::nullopt, ""};
    schema["price"] = AttributeSpec{ValueKind::number, true, false, true, kBandWidth, "USD"};
    schema["category"] = AttributeSpec{ValueKind::text, false, true, false, std::nullopt, ""};
    schema["style"] = AttributeSpec{ValueKind::text, false, true, false, std::nullopt, ""};

    std::mt19937_64 rng(seed);
    const std::size_t n = kBrands.size() * kColors.size() * kBands;
    std::vector<Item> items;
    items.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t b = i % kBrands.size();
        std::size_t c = (i / kBrands.size()) % kColors.size();
        std::size_t band = i / (kBrands.size() * kColors.size());
        std::size_t cat = pick(rng, kCategories.size());
        std::size_t sty = pick(rng, kStyles.size());
        // Strictly inside the band, two units away from either edge.
        double price = kBasePrice + kBandWidth * static_cast<double>(band) + 2.0 + std::round(unit(rng) * 1600.0) / 100.0;

        std::size_t other_brand = (b + 1 + pick(rng, kBrands.size() - 1)) % kBrands.size();
        std::size_t other_color = (c + 1 + pick(rng, kColors.size() - 1)) % kColors.size();

        Item item;
        item.id = item_id(i);
        item.title = capitalize(kStyles[sty]) + " " + kCategories[cat] + " " + std::to_string(i);
        item.description = std::string("A ") + kStyles[sty] + " " + kCategories[cat] + " in " + kColors[c] +
                           ". Often compared with the " + kBrands[other_brand] + " " + kColors[other_color] + " " +
                           kCategories[cat];
        item.attributes["brand"] = {AttributeValue::text(kBrands[b])};
        item.attributes["color"] = {AttributeValue::text(kColors[c])};
        item.attributes["price"] = {AttributeValue::number(price, "USD")};
        item.attributes["category"] = {AttributeValue::text(kCategories[cat])};
        item.attributes["style"] = {AttributeValue::text(kStyles[sty])};
        if (image_dim > 0) {
            std::vector<double> img(image_dim);
            for (std::size_t d = 0; d < image_dim; ++d)
                img[d] = (d == c % image_dim ? 1.0 : 0.0) + 0.1 * (unit(rng) - 0.5);
            item.image_features = std::move(img);
        }
        item.popularity = std::round(unit(rng) * 10000.0) / 100.0;
        items.push_back(std::move(item));
    }
    return std::make_shared<const Catalog>(std::move(schema), std::move(items));
}

std::vector<SyntheticUser> make_users(const Catalog& catalog, const SyntheticConfig& config)
{
    if (config.min_history > config.max_history)
        throw ConfigError("min_history exceeds max_history");
    if (catalog.size() < 2)
        throw PreconditionError("synthetic users need at least two catalog items");

    std::vector<std::string> soft_keys;
    for (const auto& [key, spec] : catalog.schema()) {
        if (spec.kind == ValueKind::text && !spec.hard)
            soft_keys.push_back(key);
    }

    std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<SyntheticUser> users;
    users.reserve(config.users);
    for (std::size_t u = 0; u < config.users; ++u) {
        SyntheticUser user;
        char buf[16];
        std::snprintf(buf, sizeof buf, "u%04zu", u);
        user.user_id = buf;
        const Item& target = catalog.at(pick(rng, catalog.size()));
        user.target = target.id;

        std::vector<std::size_t> related;
        for (std::size_t i = 0; i < catalog.size(); ++i) {
            const auto& item = catalog.at(i);
            if (item.id == target.id)
                continue;
            bool shares = std::any_of(soft_keys.begin(), soft_keys.end(), [&](const std::string& key) {
                const auto* a = item.find(key);
                const auto* b = target.find(key);
                if (!a || !b)
                    return false;
                for (const auto& x : *a) {
                    for (const auto& y : *b) {
                        if (x.same_value(y))
                            return true;
                    }
                }
                return false;
            });
            if (shares || soft_keys.empty())
                related.push_back(i);
        }
        if (related.empty()) {
            for (std::size_t i = 0; i < catalog.size(); ++i) {
                if (catalog.at(i).id != target.id)
                    related.push_back(i);
            }
        }
        std::size_t span = config.max_history - config.min_history + 1;
        std::size_t len = std::min(config.min_history + pick(rng, span), related.size());
        for (std::size_t j = 0; j < len; ++j) {
            std::size_t k = j + pick(rng, related.size() - j);
            std::swap(related[j], related[k]);
            user.history.push_back(catalog.at(related[j]).id);
        }
        users.push_back(std::move(user));
    }
    return users;
}

SyntheticBenchmark make_synthetic_benchmark(const SyntheticConfig& config)
{
    SyntheticBenchmark bench;
    bench.catalog = make_synthetic_catalog(config.seed, config.image_dim);
    bench.users = make_users(*bench.catalog, config);
    return bench;
}

} // namespace recfeed
