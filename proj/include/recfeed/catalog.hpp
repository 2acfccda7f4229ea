#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace recfeed {

enum class ValueKind { text, number, boolean };

const char* to_string(ValueKind kind);
std::optional<ValueKind> parse_value_kind(std::string_view name);

struct Quantity {
    double value = 0.0;
    std::string unit;

    bool operator==(const Quantity&) const = default;
};

/**
 * A single attribute value: free text, a number with an optional unit, or a boolean.
 */
class AttributeValue {
public:
    AttributeValue() : value_(std::string{}) {}

    static AttributeValue text(std::string s) { return AttributeValue(std::move(s)); }
    static AttributeValue number(double v, std::string unit = {}) { return AttributeValue(Quantity{v, std::move(unit)}); }
    static AttributeValue boolean(bool b) { return AttributeValue(b); }

    ValueKind kind() const;
    bool is_text() const { return std::holds_alternative<std::string>(value_); }
    bool is_number() const { return std::holds_alternative<Quantity>(value_); }
    bool is_boolean() const { return std::holds_alternative<bool>(value_); }

    const std::string& as_text() const { return std::get<std::string>(value_); }
    double as_number() const { return std::get<Quantity>(value_).value; }
    const std::string& unit() const { return std::get<Quantity>(value_).unit; }
    bool as_boolean() const { return std::get<bool>(value_); }

    // Text compares case-insensitively, numbers ignore units.
    bool same_value(const AttributeValue& other) const;

    bool operator==(const AttributeValue&) const = default;

private:
    template <typename T>
    explicit AttributeValue(T v) : value_(std::move(v)) {}

    std::variant<std::string, Quantity, bool> value_;
};

// "45", "45 USD", "true", or the text itself.
std::string to_string(const AttributeValue& value);
// Total order used for canonical sorting of constraint values.
bool value_less(const AttributeValue& a, const AttributeValue& b);

struct AttributeSpec {
    ValueKind kind = ValueKind::text;
    // Explicit "key: value" requests on this attribute become hard constraints.
    bool hard = false;
    // Counted by the condition-satisfaction metric.
    bool csr = false;
    // Revealed by the simulated user.
    bool reveal = false;
    // Bucket width used when a simulated user states a numeric range.
    std::optional<double> step;
    std::string unit;

    bool operator==(const AttributeSpec&) const = default;
};

using AttributeMap = std::map<std::string, std::vector<AttributeValue>>;
using Schema = std::map<std::string, AttributeSpec>;

struct Item {
    std::string id;
    std::string title;
    std::string description;
    AttributeMap attributes;
    std::optional<std::vector<double>> image_features;
    double popularity = 0.0;

    // nullptr when the attribute is absent or has no values.
    const std::vector<AttributeValue>* find(const std::string& key) const;

    bool operator==(const Item&) const = default;
};

/**
 * Immutable, validated candidate pool. Safe to share across sessions and threads.
 */
class Catalog {
public:
    Catalog(Schema schema, std::vector<Item> items);

    const Schema& schema() const { return schema_; }
    const std::vector<Item>& items() const { return items_; }
    std::size_t size() const { return items_.size(); }
    const Item& at(std::size_t index) const { return items_.at(index); }

    const Item* find(const std::string& id) const;
    std::optional<std::size_t> index_of(const std::string& id) const;

    const AttributeSpec* spec(const std::string& key) const;
    // Length of image feature vectors, 0 if no item carries any.
    std::size_t image_dim() const { return image_dim_; }

    // Keys flagged csr, or every text key when none are flagged.
    std::vector<std::string> csr_keys() const;
    // Keys flagged reveal, or every hard key when none are flagged.
    std::vector<std::string> reveal_keys() const;

    bool operator==(const Catalog& other) const { return schema_ == other.schema_ && items_ == other.items_; }

private:
    Schema schema_;
    std::vector<Item> items_;
    std::unordered_map<std::string, std::size_t> index_;
    std::size_t image_dim_ = 0;
};

// One JSON record per line; the first line is {"schema": {...}}.
Catalog load_catalog(const std::filesystem::path& path);
Catalog parse_catalog(std::istream& in);
void write_catalog(std::ostream& out, const Catalog& catalog);

// "title. description. key: value; key: value" with keys in ascending order.
std::string render_item_text(const Item& item);

} // namespace recfeed
