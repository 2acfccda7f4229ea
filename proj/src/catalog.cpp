#include "recfeed/catalog.hpp"

#include "recfeed/error.hpp"
#include "recfeed/json_io.hpp"
#include "recfeed/text.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace recfeed {

using nlohmann::json;

const char* to_string(ValueKind kind)
{
    switch (kind) {
    case ValueKind::text: return "text";
    case ValueKind::number: return "number";
    case ValueKind::boolean: return "boolean";
    }
    return "text";
}

std::optional<ValueKind> parse_value_kind(std::string_view name)
{
    if (name == "text" || name == "string")
        return ValueKind::text;
    if (name == "number")
        return ValueKind::number;
    if (name == "boolean" || name == "bool")
        return ValueKind::boolean;
    return std::nullopt;
}

ValueKind AttributeValue::kind() const
{
    if (is_number())
        return ValueKind::number;
    if (is_boolean())
        return ValueKind::boolean;
    return ValueKind::text;
}

bool AttributeValue::same_value(const AttributeValue& other) const
{
    if (kind() != other.kind())
        return false;
    switch (kind()) {
    case ValueKind::text: return text::to_lower(as_text()) == text::to_lower(other.as_text());
    case ValueKind::number: return as_number() == other.as_number();
    case ValueKind::boolean: return as_boolean() == other.as_boolean();
    }
    return false;
}

std::string to_string(const AttributeValue& value)
{
    switch (value.kind()) {
    case ValueKind::text: return value.as_text();
    case ValueKind::number: {
        auto s = text::format_number(value.as_number());
        if (!value.unit().empty())
            s += " " + value.unit();
        return s;
    }
    case ValueKind::boolean: return value.as_boolean() ? "true" : "false";
    }
    return {};
}

bool value_less(const AttributeValue& a, const AttributeValue& b)
{
    if (a.kind() != b.kind())
        return static_cast<int>(a.kind()) < static_cast<int>(b.kind());
    switch (a.kind()) {
    case ValueKind::text: return a.as_text() < b.as_text();
    case ValueKind::number:
        if (a.as_number() != b.as_number())
            return a.as_number() < b.as_number();
        return a.unit() < b.unit();
    case ValueKind::boolean: return !a.as_boolean() && b.as_boolean();
    }
    return false;
}

const std::vector<AttributeValue>* Item::find(const std::string& key) const
{
    auto it = attributes.find(key);
    if (it == attributes.end() || it->second.empty())
        return nullptr;
    return &it->second;
}

namespace {

void validate_item(const Schema& schema, const Item& item)
{
    if (item.id.empty())
        throw CatalogError("item id must be non-empty");
    if (!std::isfinite(item.popularity) || item.popularity < 0.0)
        throw CatalogError("item " + item.id + ": popularity must be finite and non-negative");
    for (const auto& [key, values] : item.attributes) {
        if (key.empty())
            throw CatalogError("item " + item.id + ": empty attribute key");
        auto spec = schema.find(key);
        if (spec == schema.end())
            throw CatalogError("item " + item.id + ": attribute '" + key + "' not in schema");
        for (const auto& v : values) {
            if (v.kind() != spec->second.kind) {
                throw CatalogError("item " + item.id + ": attribute '" + key + "' expects " +
                                   to_string(spec->second.kind) + ", got " + to_string(v.kind()) + " '" +
                                   to_string(v) + "'");
            }
            if (v.is_number() && !std::isfinite(v.as_number()))
                throw CatalogError("item " + item.id + ": attribute '" + key + "' is not finite");
        }
    }
    if (item.image_features) {
        for (double x : *item.image_features) {
            if (!std::isfinite(x))
                throw CatalogError("item " + item.id + ": non-finite image feature");
        }
    }
}

} // namespace

Catalog::Catalog(Schema schema, std::vector<Item> items)
    : schema_(std::move(schema)), items_(std::move(items))
{
    if (items_.empty())
        throw CatalogError("catalog is empty");
    for (const auto& [key, spec] : schema_) {
        if (key.empty())
            throw CatalogError("schema contains an empty attribute key");
    }
    index_.reserve(items_.size());
    for (std::size_t i = 0; i < items_.size(); ++i) {
        const auto& item = items_[i];
        validate_item(schema_, item);
        if (!index_.emplace(item.id, i).second)
            throw CatalogError("duplicate item id '" + item.id + "'");
        if (item.image_features) {
            if (image_dim_ == 0) {
                image_dim_ = item.image_features->size();
            } else if (item.image_features->size() != image_dim_) {
                throw CatalogError("item " + item.id + ": image_features length " +
                                   std::to_string(item.image_features->size()) + " != " +
                                   std::to_string(image_dim_));
            }
        }
    }
}

const Item* Catalog::find(const std::string& id) const
{
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &items_[it->second];
}

std::optional<std::size_t> Catalog::index_of(const std::string& id) const
{
    auto it = index_.find(id);
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

const AttributeSpec* Catalog::spec(const std::string& key) const
{
    auto it = schema_.find(key);
    return it == schema_.end() ? nullptr : &it->second;
}

std::vector<std::string> Catalog::csr_keys() const
{
    std::vector<std::string> keys, text_keys;
    for (const auto& [key, spec] : schema_) {
        if (spec.csr)
            keys.push_back(key);
        if (spec.kind == ValueKind::text)
            text_keys.push_back(key);
    }
    return keys.empty() ? text_keys : keys;
}

std::vector<std::string> Catalog::reveal_keys() const
{
    std::vector<std::string> keys, hard_keys;
    for (const auto& [key, spec] : schema_) {
        if (spec.reveal)
            keys.push_back(key);
        if (spec.hard)
            hard_keys.push_back(key);
    }
    return keys.empty() ? hard_keys : keys;
}

namespace {

AttributeSpec parse_spec(const std::string& key, const json& j)
{
    AttributeSpec spec;
    std::string kind_name;
    if (j.is_string()) {
        kind_name = j.get<std::string>();
    } else if (j.is_object() && j.contains("kind") && j["kind"].is_string()) {
        kind_name = j["kind"].get<std::string>();
    } else {
        throw CatalogError("schema entry '" + key + "' must be a kind name or an object with \"kind\"");
    }
    auto kind = parse_value_kind(kind_name);
    if (!kind)
        throw CatalogError("schema entry '" + key + "' has unknown kind '" + kind_name + "'");
    spec.kind = *kind;
    spec.hard = spec.kind != ValueKind::text;
    spec.csr = false;
    if (j.is_object()) {
        spec.hard = j.value("hard", spec.hard);
        spec.csr = j.value("csr", false);
        spec.reveal = j.value("reveal", false);
        spec.unit = j.value("unit", std::string{});
        if (j.contains("step")) {
            if (!j["step"].is_number() || !(j["step"].get<double>() > 0.0))
                throw CatalogError("schema entry '" + key + "': step must be a positive number");
            spec.step = j["step"].get<double>();
        }
    }
    return spec;
}

AttributeValue parse_value(const std::string& key, const AttributeSpec& spec, const json& j)
{
    switch (spec.kind) {
    case ValueKind::number:
        if (j.is_number())
            return AttributeValue::number(j.get<double>(), spec.unit);
        if (j.is_object() && j.contains("value") && j["value"].is_number())
            return AttributeValue::number(j["value"].get<double>(), j.value("unit", spec.unit));
        break;
    case ValueKind::boolean:
        if (j.is_boolean())
            return AttributeValue::boolean(j.get<bool>());
        break;
    case ValueKind::text:
        if (j.is_string())
            return AttributeValue::text(j.get<std::string>());
        break;
    }
    throw CatalogError("attribute '" + key + "' expects " + std::string(to_string(spec.kind)) + ", got " + j.dump());
}

Item parse_item(const Schema& schema, const json& j)
{
    if (!j.is_object())
        throw CatalogError("record is not an object");
    Item item;
    if (!j.contains("id") || !j["id"].is_string())
        throw CatalogError("record lacks a string \"id\"");
    item.id = j["id"].get<std::string>();
    item.title = j.value("title", std::string{});
    item.description = j.value("description", std::string{});
    if (j.contains("popularity")) {
        if (!j["popularity"].is_number())
            throw CatalogError("item " + item.id + ": popularity must be a number");
        item.popularity = j["popularity"].get<double>();
    }
    if (j.contains("attributes")) {
        const auto& attrs = j["attributes"];
        if (!attrs.is_object())
            throw CatalogError("item " + item.id + ": attributes must be an object");
        for (const auto& [key, raw] : attrs.items()) {
            auto spec = schema.find(key);
            if (spec == schema.end())
                throw CatalogError("item " + item.id + ": attribute '" + key + "' not in schema");
            std::vector<AttributeValue> values;
            if (raw.is_array()) {
                for (const auto& v : raw)
                    values.push_back(parse_value(key, spec->second, v));
            } else {
                values.push_back(parse_value(key, spec->second, raw));
            }
            item.attributes.emplace(key, std::move(values));
        }
    }
    if (j.contains("image_features") && !j["image_features"].is_null()) {
        const auto& f = j["image_features"];
        if (!f.is_array())
            throw CatalogError("item " + item.id + ": image_features must be an array");
        std::vector<double> feats;
        for (const auto& x : f) {
            if (!x.is_number())
                throw CatalogError("item " + item.id + ": image_features must be numeric");
            feats.push_back(x.get<double>());
        }
        item.image_features = std::move(feats);
    }
    validate_item(schema, item);
    return item;
}

} // namespace

Catalog parse_catalog(std::istream& in)
{
    Schema schema;
    bool have_schema = false;
    std::vector<Item> items;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty())
            continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw CatalogError(std::string("malformed record: ") + e.what(), line_no);
        }
        try {
            if (!have_schema) {
                if (!j.is_object() || !j.contains("schema") || !j["schema"].is_object())
                    throw CatalogError("first record must be {\"schema\": {...}}");
                for (const auto& [key, spec] : j["schema"].items())
                    schema.emplace(key, parse_spec(key, spec));
                have_schema = true;
                continue;
            }
            Item item = parse_item(schema, j);
            if (!seen.insert(item.id).second)
                throw CatalogError("duplicate item id '" + item.id + "'");
            items.push_back(std::move(item));
        } catch (const CatalogError& e) {
            if (e.line())
                throw;
            throw CatalogError(e.what(), line_no);
        }
    }
    if (!have_schema)
        throw CatalogError("missing schema record");
    return Catalog(std::move(schema), std::move(items));
}

Catalog load_catalog(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw CatalogError("cannot open catalog file " + path.string());
    return parse_catalog(in);
}

void write_catalog(std::ostream& out, const Catalog& catalog)
{
    json schema = json::object();
    for (const auto& [key, spec] : catalog.schema()) {
        json s = {{"kind", to_string(spec.kind)}, {"hard", spec.hard}};
        if (spec.csr)
            s["csr"] = true;
        if (spec.reveal)
            s["reveal"] = true;
        if (spec.step)
            s["step"] = *spec.step;
        if (!spec.unit.empty())
            s["unit"] = spec.unit;
        schema[key] = s;
    }
    out << json{{"schema", schema}}.dump() << '\n';
    for (const auto& item : catalog.items()) {
        json j = {{"id", item.id}, {"title", item.title}, {"description", item.description}};
        json attrs = json::object();
        for (const auto& [key, values] : item.attributes) {
            json arr = json::array();
            const auto* spec = catalog.spec(key);
            for (const auto& v : values) {
                if (v.is_number() && spec && v.unit() == spec->unit)
                    arr.push_back(v.as_number());
                else
                    arr.push_back(json(v));
            }
            attrs[key] = arr;
        }
        j["attributes"] = attrs;
        if (item.image_features)
            j["image_features"] = *item.image_features;
        j["popularity"] = item.popularity;
        out << j.dump() << '\n';
    }
}

std::string render_item_text(const Item& item)
{
    std::string out = item.title;
    std::string_view desc = item.description;
    while (!desc.empty() && (desc.back() == '.' || desc.back() == ' '))
        desc.remove_suffix(1);
    if (!desc.empty())
        out += ". " + std::string(desc);
    out += ".";
    std::string attrs;
    // std::map iteration is already ascending by key.
    for (const auto& [key, values] : item.attributes) {
        if (!attrs.empty())
            attrs += "; ";
        attrs += key + ": ";
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i)
                attrs += ", ";
            attrs += to_string(values[i]);
        }
    }
    if (!attrs.empty())
        out += " " + attrs;
    return out;
}

} // namespace recfeed
