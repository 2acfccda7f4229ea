#include "fixtures.hpp"

#include "recfeed/runtime.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>

namespace recfeed::testing {

AttributeValue txt(std::string s)
{
    return AttributeValue::text(std::move(s));
}

AttributeValue num(double v)
{
    return AttributeValue::number(v, "USD");
}

Item make_item(std::string id, AttributeMap attributes, double popularity, std::string title)
{
    Item item;
    item.title = title.empty() ? id : std::move(title);
    item.id = std::move(id);
    item.attributes = std::move(attributes);
    item.popularity = popularity;
    return item;
}

Constraint make_constraint(std::string attribute, Op op, std::vector<AttributeValue> values, Strictness strictness,
                           Polarity polarity, int round)
{
    Constraint c;
    c.attribute = std::move(attribute);
    c.op = op;
    c.values = std::move(values);
    c.strictness = strictness;
    c.polarity = polarity;
    c.source_round = round;
    return c;
}

std::shared_ptr<const Catalog> mini_catalog()
{
    Schema schema;
    schema["brand"] = AttributeSpec{ValueKind::text, true, true, true, std::nullopt, ""};
    schema["color"] = AttributeSpec{ValueKind::text, true, true, true, std::nullopt, ""};
    schema["price"] = AttributeSpec{ValueKind::number, true, true, true, 20.0, "USD"};
    schema["category"] = AttributeSpec{ValueKind::text, false, true, false, std::nullopt, ""};
    schema["style"] = AttributeSpec{ValueKind::text, false, true, false, std::nullopt, ""};

    struct Row {
        const char* id;
        const char* title;
        const char* brand;
        const char* color;
        double price;
        const char* category;
        const char* style;
        double popularity;
    };
    const Row rows[] = {
        {"d1", "Floral Midi Dress", "aurora", "red", 45, "dress", "floral", 90},
        {"d2", "Linen Wrap Dress", "birch", "white", 80, "dress", "minimalist", 70},
        {"d3", "Velvet Evening Gown", "aurora", "black", 120, "dress", "elegant", 60},
        {"d4", "Polka Sundress", "coral", "blue", 30, "dress", "retro", 85},
        {"b1", "The Quiet Harbor", "northwind", "blue", 18, "mystery", "noir", 75},
        {"b2", "Letters in Spring", "northwind", "green", 22, "romance", "cozy", 50},
        {"b3", "Cold Case Files", "inkwell", nullptr, 15, "mystery", "procedural", 40},
        {"b4", "Hearth and Home", "inkwell", "red", 25, "romance", "cozy", 30},
        {"s1", "Trail Runner", "stride", "black", 95, "shoes", "sporty", 80},
        {"s2", "Canvas Sneaker", "stride", "white", 55, "shoes", "casual", 65},
        {"s3", "Leather Loafer", "birch", "brown", 140, "shoes", "classic", 55},
        {"s4", "Rain Boot", "coral", "yellow", 48, "shoes", nullptr, 20},
    };
    std::vector<Item> items;
    int n = 0;
    for (const auto& r : rows) {
        AttributeMap attrs;
        attrs["brand"] = {txt(r.brand)};
        if (r.color)
            attrs["color"] = {txt(r.color)};
        attrs["price"] = {num(r.price)};
        attrs["category"] = {txt(r.category)};
        if (r.style)
            attrs["style"] = {txt(r.style)};
        Item item = make_item(r.id, std::move(attrs), r.popularity, r.title);
        item.description = std::string("A ") + (r.style ? r.style : "plain") + " " + r.category + " piece.";
        item.image_features = std::vector<double>{0.1 * (n % 3), 0.2 * (n % 4), r.price / 100.0};
        items.push_back(std::move(item));
        ++n;
    }
    return std::make_shared<const Catalog>(std::move(schema), std::move(items));
}

namespace {

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& xs)
{
    return xs[std::uniform_int_distribution<std::size_t>(0, xs.size() - 1)(rng)];
}

bool chance(std::mt19937_64& rng, double p)
{
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

const std::vector<std::string> kBrands = {"acme", "bolt", "crest", "dune", "echo"};
const std::vector<std::string> kColors = {"red", "blue", "green", "black"};
const std::vector<std::string> kTags = {"eco", "sale", "new", "retro"};

std::string maybe_upper(std::mt19937_64& rng, std::string s)
{
    if (chance(rng, 0.2))
        std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

} // namespace

std::shared_ptr<const Catalog> random_filter_catalog(std::mt19937_64& rng, std::size_t n)
{
    Schema schema;
    schema["brand"] = AttributeSpec{ValueKind::text, true, true, true, std::nullopt, ""};
    schema["color"] = AttributeSpec{ValueKind::text, true, true, true, std::nullopt, ""};
    schema["tags"] = AttributeSpec{ValueKind::text, false, false, false, std::nullopt, ""};
    schema["price"] = AttributeSpec{ValueKind::number, true, false, false, 20.0, "USD"};
    schema["rating"] = AttributeSpec{ValueKind::number, false, false, false, std::nullopt, ""};

    std::uniform_int_distribution<int> price(0, 200);
    std::uniform_int_distribution<int> rating(1, 5);
    std::vector<Item> items;
    for (std::size_t i = 0; i < n; ++i) {
        AttributeMap attrs;
        if (chance(rng, 0.9))
            attrs["brand"] = {txt(pick(rng, kBrands))};
        if (chance(rng, 0.85)) {
            attrs["color"] = {txt(pick(rng, kColors))};
            if (chance(rng, 0.3))
                attrs["color"].push_back(txt(pick(rng, kColors)));
        }
        if (chance(rng, 0.7)) {
            attrs["tags"] = {txt(pick(rng, kTags))};
            if (chance(rng, 0.4))
                attrs["tags"].push_back(txt(pick(rng, kTags)));
        }
        if (chance(rng, 0.9))
            attrs["price"] = {num(price(rng))};
        if (chance(rng, 0.8))
            attrs["rating"] = {AttributeValue::number(rating(rng))};
        char id[32];
        std::snprintf(id, sizeof id, "i%04zu", i);
        items.push_back(make_item(id, std::move(attrs), static_cast<double>(price(rng))));
    }
    return std::make_shared<const Catalog>(std::move(schema), std::move(items));
}

Constraint random_hard_constraint(std::mt19937_64& rng, Polarity polarity)
{
    static const std::vector<std::string> keys = {"brand", "color", "tags", "price", "rating", "weight"};
    const auto& key = pick(rng, keys);
    std::uniform_int_distribution<int> price(0, 200);
    Constraint c;
    c.attribute = key;
    c.strictness = Strictness::hard;
    c.polarity = polarity;
    c.source_round = 1;
    if (key == "price" || key == "rating" || key == "weight") {
        static const std::vector<Op> ops = {Op::less_than, Op::less_equal, Op::greater_than,
                                            Op::greater_equal, Op::between, Op::equals};
        c.op = pick(rng, ops);
        int hi = key == "rating" ? 5 : 200;
        std::uniform_int_distribution<int> v(0, hi);
        if (c.op == Op::between) {
            int a = v(rng), b = v(rng);
            c.values = {num(std::min(a, b)), num(std::max(a, b))};
        } else {
            c.values = {num(v(rng))};
        }
        return c;
    }
    const auto& pool = key == "brand" ? kBrands : key == "color" ? kColors : kTags;
    static const std::vector<Op> ops = {Op::equals, Op::contains, Op::excludes};
    c.op = pick(rng, ops);
    if (c.op == Op::contains) {
        auto v = pick(rng, pool);
        c.values = {txt(maybe_upper(rng, v.substr(0, 1 + rng() % v.size())))};
    } else {
        c.values = {txt(maybe_upper(rng, pick(rng, pool)))};
        if (chance(rng, 0.3))
            c.values.push_back(txt(pick(rng, pool)));
    }
    return c;
}

FilterInstance random_filter_instance(std::mt19937_64& rng, std::size_t max_items, std::size_t max_constraints)
{
    FilterInstance inst;
    auto n = std::uniform_int_distribution<std::size_t>(1, max_items)(rng);
    inst.catalog = random_filter_catalog(rng, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (chance(rng, 0.8))
            inst.pool.push_back(i);
    }
    auto k = std::uniform_int_distribution<std::size_t>(0, max_constraints)(rng);
    for (std::size_t i = 0; i < k; ++i) {
        if (chance(rng, 0.6))
            inst.positive.push_back(random_hard_constraint(rng, Polarity::positive));
        else
            inst.negative.push_back(random_hard_constraint(rng, Polarity::negative));
    }
    return inst;
}

std::shared_ptr<const Catalog> preference_catalog()
{
    static const auto catalog = mini_catalog();
    return catalog;
}

Extraction random_extraction(std::mt19937_64& rng, int round)
{
    static const std::map<std::string, std::vector<std::string>> vocab = {
        {"brand", {"aurora", "birch", "coral", "stride"}},
        {"color", {"red", "blue", "black", "white"}},
        {"category", {"dress", "mystery", "romance", "shoes"}},
        {"style", {"floral", "cozy", "retro", "sporty"}},
    };
    static const std::vector<std::string> keys = {"brand", "color", "price", "category", "style"};
    static const std::vector<std::string> phrases = {"comfy", "bold", "vintage vibe"};

    Extraction e;
    auto n = std::uniform_int_distribution<int>(0, 3)(rng);
    for (int i = 0; i < n; ++i) {
        const auto& key = pick(rng, keys);
        auto polarity = chance(rng, 0.6) ? Polarity::positive : Polarity::negative;
        Constraint c;
        c.attribute = key;
        c.polarity = polarity;
        c.source_round = round;
        if (key == "price") {
            static const std::vector<Op> ops = {Op::less_than, Op::less_equal, Op::greater_than, Op::greater_equal,
                                                Op::between};
            c.op = pick(rng, ops);
            c.strictness = Strictness::hard;
            std::uniform_int_distribution<int> step(1, 8);
            if (c.op == Op::between) {
                int a = 20 * step(rng), b = 20 * step(rng);
                c.values = {num(std::min(a, b)), num(std::max(a, b))};
            } else {
                c.values = {num(20 * step(rng))};
            }
        } else {
            bool hard_key = key == "brand" || key == "color";
            c.strictness = hard_key != chance(rng, 0.2) ? Strictness::hard : Strictness::soft;
            c.op = c.strictness == Strictness::hard ? Op::equals : Op::contains;
            c.values = {txt(pick(rng, vocab.at(key)))};
        }
        (polarity == Polarity::positive ? e.positive : e.negative).push_back(std::move(c));
    }
    if (chance(rng, 0.2))
        (chance(rng, 0.5) ? e.free_text_positive : e.free_text_negative).push_back(pick(rng, phrases));
    e.change_marker = chance(rng, 0.15);
    normalize(e);
    return e;
}

PreferenceState random_memory(std::mt19937_64& rng)
{
    PreferenceState m;
    auto steps = std::uniform_int_distribution<int>(1, 4)(rng);
    for (int r = 1; r <= steps; ++r) {
        auto e = random_extraction(rng, r);
        m = consolidate(m, e, classify_feedback(m, e, Feed{}));
    }
    return m;
}

TestStack make_stack(std::shared_ptr<const Catalog> catalog, PlannerMode mode)
{
    RuntimeOptions options;
    options.mode = mode;
    TestStack s;
    s.catalog = catalog;
    s.index = make_index(catalog, options);
    s.engine = make_engine(s.index, options);
    s.engine->set_clock([] { return std::string("2026-01-01T00:00:00Z"); });
    return s;
}

std::vector<HttpStep> golden_script()
{
    return {
        {"POST", "/sessions", R"({"user_id": "u7", "session_id": "golden", "history": ["b2", "b4"], "config": {"t_max": 4, "k": 4}})", 201},
        {"POST", "/sessions/golden/commands", R"({"text": "something under $50, no red"})", 200},
        {"POST", "/sessions/golden/commands", R"({"text": "prefer cozy romance, nothing floral"})", 200},
        {"GET", "/sessions/golden", "", 200},
    };
}

bool json_close(const nlohmann::json& a, const nlohmann::json& b, double tol, std::string* where)
{
    auto fail = [&](const std::string& why) {
        if (where)
            *where = why;
        return false;
    };
    if (a.is_number() && b.is_number()) {
        if (std::abs(a.get<double>() - b.get<double>()) <= tol)
            return true;
        return fail(a.dump() + " vs " + b.dump());
    }
    if (a.type() != b.type())
        return fail("type " + std::string(a.type_name()) + " vs " + b.type_name());
    if (a.is_object()) {
        if (a.size() != b.size())
            return fail("object size");
        for (auto it = a.begin(); it != a.end(); ++it) {
            if (!b.contains(it.key()))
                return fail("missing key " + it.key());
            if (!json_close(it.value(), b.at(it.key()), tol, where)) {
                if (where)
                    *where = it.key() + "." + *where;
                return false;
            }
        }
        return true;
    }
    if (a.is_array()) {
        if (a.size() != b.size())
            return fail("array size");
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!json_close(a[i], b[i], tol, where)) {
                if (where)
                    *where = "[" + std::to_string(i) + "]." + *where;
                return false;
            }
        }
        return true;
    }
    return a == b ? true : fail(a.dump() + " vs " + b.dump());
}

nlohmann::json golden(const std::string& name, const nlohmann::json& actual)
{
    std::string path = std::string(RECFEED_GOLDEN_DIR) + "/" + name;
    if (std::getenv("RECFEED_UPDATE_GOLDEN")) {
        std::ofstream out(path);
        out << actual.dump(2) << '\n';
    }
    std::ifstream in(path);
    if (!in)
        return nullptr;
    return nlohmann::json::parse(in, nullptr, false);
}

} // namespace recfeed::testing
