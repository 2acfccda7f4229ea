#include "recfeed/embedding.hpp"

#include "recfeed/error.hpp"
#include "recfeed/text.hpp"

#include <algorithm>
#include <cmath>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace recfeed {

Vector::Vector(std::vector<double> values) : values_(std::move(values))
{
    for (double v : values_) {
        if (!std::isfinite(v))
            throw PreconditionError("vector contains a non-finite entry");
    }
}

double Vector::norm() const
{
    double s = 0.0;
    for (double v : values_)
        s += v * v;
    return std::sqrt(s);
}

bool Vector::is_zero() const
{
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

const char* to_string(ProviderKind kind)
{
    return kind == ProviderKind::hashed ? "hashed" : "external";
}

void EmbeddingProviderConfig::validate() const
{
    if (dim == 0)
        throw ConfigError("embedding dim must be positive");
    if (kind == ProviderKind::external && endpoint.empty())
        throw ConfigError("external embedding provider requires an endpoint");
}

Vector EmbeddingProvider::embed(std::string_view text) const
{
    std::string s(text);
    auto rows = embed_batch(std::span<const std::string>(&s, 1));
    return std::move(rows.front());
}

namespace {

void normalize_in_place(std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v)
        s += x * x;
    if (s == 0.0)
        return;
    double inv = 1.0 / std::sqrt(s);
    for (double& x : v)
        x *= inv;
}

void require_text(const std::string& t)
{
    if (t.empty())
        throw PreconditionError("cannot embed empty text");
}

} // namespace

HashedEmbedding::HashedEmbedding(std::size_t dim) : dim_(dim)
{
    if (dim_ == 0)
        throw ConfigError("embedding dim must be positive");
}

Vector HashedEmbedding::embed_one(std::string_view text) const
{
    std::vector<double> v(dim_, 0.0);
    for (const auto& token : text::tokenize(text)) {
        auto bucket = text::fnv1a64(token) % dim_;
        double sign = (text::fnv1a64(token, text::kFnvOffsetAlt) & 1U) ? 1.0 : -1.0;
        v[bucket] += sign;
    }
    normalize_in_place(v);
    return Vector(std::move(v));
}

std::vector<Vector> HashedEmbedding::embed_batch(std::span<const std::string> texts) const
{
    std::vector<Vector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
        require_text(t);
        out.push_back(embed_one(t));
    }
    return out;
}

ExternalEmbedding::ExternalEmbedding(std::string endpoint, std::size_t dim, double timeout_seconds)
    : endpoint_(std::move(endpoint)), dim_(dim), timeout_seconds_(timeout_seconds)
{
    if (dim_ == 0)
        throw ConfigError("embedding dim must be positive");
    auto scheme = endpoint_.find("://");
    if (scheme == std::string::npos)
        throw ConfigError("embedding endpoint must be an http(s) URL: " + endpoint_);
    auto slash = endpoint_.find('/', scheme + 3);
    base_ = slash == std::string::npos ? endpoint_ : endpoint_.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : endpoint_.substr(slash);
}

std::vector<Vector> ExternalEmbedding::embed_batch(std::span<const std::string> texts) const
{
    for (const auto& t : texts)
        require_text(t);
    if (texts.empty())
        return {};

    httplib::Client client(base_);
    auto secs = static_cast<time_t>(timeout_seconds_);
    auto usecs = static_cast<time_t>((timeout_seconds_ - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);

    nlohmann::json body = {{"texts", std::vector<std::string>(texts.begin(), texts.end())}};
    auto res = client.Post(path_, body.dump(), "application/json");
    if (!res)
        throw TransportError(endpoint_, "unreachable (" + httplib::to_string(res.error()) + ")");
    if (res->status != 200)
        throw TransportError(endpoint_, "HTTP " + std::to_string(res->status), res->body);

    std::vector<Vector> out;
    try {
        auto j = nlohmann::json::parse(res->body);
        const auto& rows = j.at("vectors");
        if (!rows.is_array() || rows.size() != texts.size())
            throw TransportError(endpoint_, "row count mismatch", res->body);
        for (const auto& row : rows) {
            auto v = row.get<std::vector<double>>();
            if (v.size() != dim_)
                throw TransportError(endpoint_, "vector dim " + std::to_string(v.size()) + " != " + std::to_string(dim_),
                                     res->body);
            normalize_in_place(v);
            out.emplace_back(std::move(v));
        }
    } catch (const nlohmann::json::exception& e) {
        throw TransportError(endpoint_, std::string("malformed response: ") + e.what(), res->body);
    } catch (const PreconditionError& e) {
        throw TransportError(endpoint_, e.what(), res->body);
    }
    return out;
}

CachedEmbedding::CachedEmbedding(std::shared_ptr<const EmbeddingProvider> inner) : inner_(std::move(inner))
{
    if (!inner_)
        throw ConfigError("cached provider needs an inner provider");
}

std::string CachedEmbedding::key_for(const std::string& text) const
{
    return std::string(to_string(inner_->kind())) + ":" + std::to_string(inner_->dim()) + ":" + text;
}

std::vector<Vector> CachedEmbedding::embed_batch(std::span<const std::string> texts) const
{
    for (const auto& t : texts)
        require_text(t);

    std::vector<Vector> out(texts.size());
    std::vector<std::size_t> missing;
    {
        std::lock_guard lock(mu_);
        for (std::size_t i = 0; i < texts.size(); ++i) {
            auto it = cache_.find(key_for(texts[i]));
            if (it != cache_.end())
                out[i] = it->second;
            else
                missing.push_back(i);
        }
    }
    if (missing.empty())
        return out;

    std::vector<std::string> pending;
    pending.reserve(missing.size());
    for (auto i : missing)
        pending.push_back(texts[i]);
    // Call the inner provider outside the lock; a racing duplicate fill is harmless.
    auto fresh = inner_->embed_batch(pending);

    std::lock_guard lock(mu_);
    for (std::size_t j = 0; j < missing.size(); ++j) {
        out[missing[j]] = fresh[j];
        cache_.emplace(key_for(pending[j]), std::move(fresh[j]));
    }
    return out;
}

std::size_t CachedEmbedding::cache_size() const
{
    std::lock_guard lock(mu_);
    return cache_.size();
}

std::shared_ptr<const EmbeddingProvider> make_provider(const EmbeddingProviderConfig& config)
{
    config.validate();
    std::shared_ptr<const EmbeddingProvider> inner;
    if (config.kind == ProviderKind::hashed)
        inner = std::make_shared<HashedEmbedding>(config.dim);
    else
        inner = std::make_shared<ExternalEmbedding>(config.endpoint, config.dim, config.timeout_seconds);
    return std::make_shared<CachedEmbedding>(std::move(inner));
}

double cosine_sim(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size())
        throw PreconditionError("cosine_sim: dim mismatch " + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0)
        return 0.0;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double cosine_sim(const Vector& a, const Vector& b)
{
    return cosine_sim(a.span(), b.span());
}

} // namespace recfeed
