#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace recfeed {

/**
 * Fixed-length vector of finite numbers. Construction rejects NaN/Inf.
 */
class Vector {
public:
    Vector() = default;
    explicit Vector(std::vector<double> values);

    static Vector zeros(std::size_t dim) { return Vector(std::vector<double>(dim, 0.0)); }

    std::size_t dim() const { return values_.size(); }
    const std::vector<double>& values() const { return values_; }
    std::span<const double> span() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    double norm() const;
    bool is_zero() const;

    bool operator==(const Vector&) const = default;

private:
    std::vector<double> values_;
};

enum class ProviderKind { hashed, external };

const char* to_string(ProviderKind kind);

struct EmbeddingProviderConfig {
    ProviderKind kind = ProviderKind::hashed;
    std::size_t dim = 64;
    std::string endpoint;
    double timeout_seconds = 10.0;

    // Throws ConfigError: dim must be positive, external requires an endpoint.
    void validate() const;
};

/**
 * Text embedding provider. Implementations are read-only after construction
 * and may be called concurrently.
 */
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    virtual ProviderKind kind() const = 0;
    virtual std::size_t dim() const = 0;
    // Row order matches input order. Empty texts are a PreconditionError.
    virtual std::vector<Vector> embed_batch(std::span<const std::string> texts) const = 0;

    Vector embed(std::string_view text) const;
};

/**
 * Offline baseline: signed feature hashing of lowercase alphanumeric tokens,
 * L2-normalized. A text without tokens embeds to the zero vector.
 */
class HashedEmbedding final : public EmbeddingProvider {
public:
    explicit HashedEmbedding(std::size_t dim = 64);

    ProviderKind kind() const override { return ProviderKind::hashed; }
    std::size_t dim() const override { return dim_; }
    std::vector<Vector> embed_batch(std::span<const std::string> texts) const override;

    Vector embed_one(std::string_view text) const;

private:
    std::size_t dim_;
};

/**
 * Remote provider: POST {"texts": [...]} -> {"vectors": [[...], ...]}.
 * Returned rows are L2-normalized.
 */
class ExternalEmbedding final : public EmbeddingProvider {
public:
    ExternalEmbedding(std::string endpoint, std::size_t dim, double timeout_seconds = 10.0);

    ProviderKind kind() const override { return ProviderKind::external; }
    std::size_t dim() const override { return dim_; }
    std::vector<Vector> embed_batch(std::span<const std::string> texts) const override;

    const std::string& endpoint() const { return endpoint_; }

private:
    std::string endpoint_;
    std::string base_;
    std::string path_;
    std::size_t dim_;
    double timeout_seconds_;
};

/**
 * Memoizing decorator keyed by (provider kind, dim, text). Internally synchronized.
 */
class CachedEmbedding final : public EmbeddingProvider {
public:
    explicit CachedEmbedding(std::shared_ptr<const EmbeddingProvider> inner);

    ProviderKind kind() const override { return inner_->kind(); }
    std::size_t dim() const override { return inner_->dim(); }
    std::vector<Vector> embed_batch(std::span<const std::string> texts) const override;

    std::size_t cache_size() const;

private:
    std::string key_for(const std::string& text) const;

    std::shared_ptr<const EmbeddingProvider> inner_;
    mutable std::mutex mu_;
    mutable std::unordered_map<std::string, Vector> cache_;
};

std::shared_ptr<const EmbeddingProvider> make_provider(const EmbeddingProviderConfig& config);

// dot(a,b)/(|a||b|) clamped to [-1, 1]; 0.0 if either side is the zero vector.
double cosine_sim(std::span<const double> a, std::span<const double> b);
double cosine_sim(const Vector& a, const Vector& b);

} // namespace recfeed
