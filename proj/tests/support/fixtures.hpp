#pragma once

#include "recfeed/catalog.hpp"
#include "recfeed/parser.hpp"
#include "recfeed/planner.hpp"
#include "recfeed/preference.hpp"
#include "recfeed/session.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace recfeed::testing {

// Twelve hand-written items: dresses, books and shoes with brand, color,
// price, category and style.
std::shared_ptr<const Catalog> mini_catalog();

Item make_item(std::string id, AttributeMap attributes, double popularity = 0.0, std::string title = {});

Constraint make_constraint(std::string attribute, Op op, std::vector<AttributeValue> values,
                           Strictness strictness = Strictness::hard, Polarity polarity = Polarity::positive,
                           int round = 1);

AttributeValue txt(std::string s);
AttributeValue num(double v);

// Random catalog over brand/color/tags/price/rating with gaps and multi-valued
// text attributes.
std::shared_ptr<const Catalog> random_filter_catalog(std::mt19937_64& rng, std::size_t items);

struct FilterInstance {
    std::shared_ptr<const Catalog> catalog;
    std::vector<std::size_t> pool;
    std::vector<Constraint> positive;
    std::vector<Constraint> negative;
};

// Catalog of up to max_items items, a random sub-pool and up to max_constraints hard rules.
FilterInstance random_filter_instance(std::mt19937_64& rng, std::size_t max_items, std::size_t max_constraints);
Constraint random_hard_constraint(std::mt19937_64& rng, Polarity polarity);

// Schema used by the consolidation generators.
std::shared_ptr<const Catalog> preference_catalog();
Extraction random_extraction(std::mt19937_64& rng, int round);
// Built by consolidating a few random extractions into empty memory.
PreferenceState random_memory(std::mt19937_64& rng);

struct TestStack {
    std::shared_ptr<const Catalog> catalog;
    std::shared_ptr<const ItemIndex> index;
    std::shared_ptr<SessionEngine> engine;
};

// Rule parser, hashed embedding, fixed clock.
TestStack make_stack(std::shared_ptr<const Catalog> catalog, PlannerMode mode = PlannerMode::full);

struct HttpStep {
    std::string method;
    std::string path;
    std::string body;
    int status;
};

// Scripted session on the mini catalog whose final view is kept under golden/.
std::vector<HttpStep> golden_script();

// Structural equality with numbers compared to within tol.
bool json_close(const nlohmann::json& a, const nlohmann::json& b, double tol, std::string* where = nullptr);

// Reads golden/<name>; when RECFEED_UPDATE_GOLDEN is set, writes actual there first.
nlohmann::json golden(const std::string& name, const nlohmann::json& actual);

} // namespace recfeed::testing
