#pragma once

#include "recfeed/aia.hpp"
#include "recfeed/catalog.hpp"
#include "recfeed/embedding.hpp"
#include "recfeed/feed.hpp"
#include "recfeed/kernels.hpp"
#include "recfeed/preference.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace recfeed {

struct ToolParams {
    double alpha = 0.5;
    double beta = 1.0;
    // Standardize s_aia over the scored pool before mixing with s_sem.
    bool standardize_aia = true;

    void validate() const;
};

struct ToolDescription {
    std::string name;
    std::vector<std::string> inputs;
    std::string output;
    std::string description;
};

const std::vector<ToolDescription>& tool_registry();

struct FilterResult {
    // Catalog indices, in pool order.
    std::vector<std::size_t> survivors;
    // Constraints skipped because the schema does not know their attribute.
    std::vector<std::string> warnings;
};

FilterResult filter(const Catalog& catalog, std::span<const std::size_t> pool,
                    const std::vector<Constraint>& positive_hard, const std::vector<Constraint>& negative_hard,
                    kernels::Exec exec = kernels::Exec::parallel);

// "attr: [v1, v2], attr2: [less_than 50]" over one polarity of the state,
// keys ascending; free-text phrases render under "style_hint". Exclusion
// rules carry no affinity and are left out.
std::string format_intent(const PreferenceState& state, Polarity side);

double semantic_score(const Item& item, const std::string& intent_text, const EmbeddingProvider& provider);
double attenuate(const Item& item, const std::string& negative_text, const ToolParams& params,
                 const EmbeddingProvider& provider);
// -beta * max(0, similarity)
double attenuation_from_similarity(double similarity, const ToolParams& params);

// alpha * s_sem + (1 - alpha) * s_aia; a skipped path hands its weight to the other.
double match_score(double s_sem, double s_aia, const ToolParams& params, bool semantic_skipped = false,
                   bool aia_skipped = false);

// s_final = s_match + s_atten for every entry, then the global ranking order.
void aggregate(std::vector<FeedEntry>& entries);

/**
 * Per-catalog precomputation shared by all sessions: item text embeddings and
 * fused AIA representations.
 */
class ItemIndex {
public:
    ItemIndex(std::shared_ptr<const Catalog> catalog, std::shared_ptr<const EmbeddingProvider> provider,
              std::shared_ptr<const AiaModel> model);

    const Catalog& catalog() const { return *catalog_; }
    const EmbeddingProvider& provider() const { return *provider_; }
    const AiaModel& model() const { return *model_; }
    std::shared_ptr<const Catalog> catalog_ptr() const { return catalog_; }

    const kernels::RowMatrix& text_embeddings() const { return text_; }
    const kernels::RowMatrix& fused() const { return fused_; }
    Eigen::VectorXd fused_row(std::size_t index) const;

private:
    std::shared_ptr<const Catalog> catalog_;
    std::shared_ptr<const EmbeddingProvider> provider_;
    std::shared_ptr<const AiaModel> model_;
    kernels::RowMatrix text_;
    kernels::RowMatrix fused_;
};

struct AiaResult {
    double score = 0.0;
    bool skipped = true;
};

AiaResult aia_score(const Item& item, const Vector& intent, const UserHistory& history, const ItemIndex& index);

// Scores for many candidates against one encoded history.
std::vector<double> aia_scores(std::span<const std::size_t> candidates, const Vector& intent,
                               const UserHistory& history, const ItemIndex& index,
                               kernels::Exec exec = kernels::Exec::parallel);

AiaEncoding encode_history(const Vector& intent, const UserHistory& history, const ItemIndex& index);

} // namespace recfeed
