#include "recfeed/tools.hpp"

#include "recfeed/error.hpp"
#include "recfeed/text.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace recfeed {

void ToolParams::validate() const
{
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw ConfigError("alpha must lie in [0, 1]");
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw ConfigError("beta must be positive");
}

const std::vector<ToolDescription>& tool_registry()
{
    static const std::vector<ToolDescription> tools = {
        {"Filter",
         {"candidate_pool", "positive_hard", "negative_hard"},
         "filtered_pool",
         "Keeps items satisfying every positive hard constraint and violating no negative hard constraint."},
        {"Matcher",
         {"filtered_pool", "positive_intent", "history"},
         "s_match",
         "Scores items by semantic similarity to the positive intent and by intent-aware attention over the history."},
        {"Attenuator",
         {"filtered_pool", "negative_intent"},
         "s_atten",
         "Penalizes items in proportion to their similarity with disliked content."},
        {"Aggregator",
         {"s_match", "s_atten"},
         "ranked_feed",
         "Sums matcher and attenuator scores and ranks items by the result."},
        {"DefaultRanker", {"candidate_pool"}, "ranked_feed", "Ranks items by popularity."},
        {"RandomRanker", {"candidate_pool"}, "ranked_feed", "Ranks items in a seeded pseudo-random order."},
    };
    return tools;
}

FilterResult filter(const Catalog& catalog, std::span<const std::size_t> pool,
                    const std::vector<Constraint>& positive_hard, const std::vector<Constraint>& negative_hard,
                    kernels::Exec exec)
{
    FilterResult out;
    std::vector<Constraint> pos, neg;
    auto screen = [&](const std::vector<Constraint>& in, std::vector<Constraint>& kept) {
        for (const auto& c : in) {
            if (!catalog.spec(c.attribute)) {
                out.warnings.push_back("unknown attribute '" + c.attribute + "' skipped");
                continue;
            }
            kept.push_back(c);
        }
    };
    screen(positive_hard, pos);
    screen(negative_hard, neg);

    auto mask = kernels::filter_mask(catalog, pool, pos, neg, exec);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (mask[i])
            out.survivors.push_back(pool[i]);
    }
    return out;
}

namespace {

std::string render_value(const AttributeValue& v)
{
    return v.is_number() ? text::format_number(v.as_number()) : to_string(v);
}

std::string render_range(const Constraint& c)
{
    std::string s = to_string(c.op);
    for (const auto& v : c.values)
        s += " " + render_value(v);
    return s;
}

} // namespace

std::string format_intent(const PreferenceState& state, Polarity side)
{
    std::map<std::string, std::vector<std::string>> groups;
    auto add = [&](const std::string& key, std::string value) {
        auto& g = groups[key];
        if (std::find(g.begin(), g.end(), value) == g.end())
            g.push_back(std::move(value));
    };
    for (auto strictness : {Strictness::hard, Strictness::soft}) {
        for (const auto& c : state.bucket(side, strictness)) {
            if (c.op == Op::excludes)
                continue;
            if (is_range_op(c.op)) {
                add(c.attribute, render_range(c));
                continue;
            }
            for (const auto& v : c.values)
                add(c.attribute, render_value(v));
        }
    }
    const auto& phrases = side == Polarity::positive ? state.free_text_positive : state.free_text_negative;
    for (const auto& p : phrases)
        add("style_hint", p);

    std::string out;
    for (const auto& [key, values] : groups) {
        if (!out.empty())
            out += ", ";
        out += key + ": [" + text::join(values, ", ") + "]";
    }
    return out;
}

double semantic_score(const Item& item, const std::string& intent_text, const EmbeddingProvider& provider)
{
    if (intent_text.empty())
        throw PreconditionError("semantic_score needs a non-empty intent");
    std::vector<std::string> texts = {render_item_text(item), intent_text};
    auto v = provider.embed_batch(texts);
    return cosine_sim(v[0], v[1]);
}

double attenuation_from_similarity(double similarity, const ToolParams& params)
{
    return -params.beta * std::max(0.0, similarity);
}

double attenuate(const Item& item, const std::string& negative_text, const ToolParams& params,
                 const EmbeddingProvider& provider)
{
    if (negative_text.empty())
        return 0.0;
    std::vector<std::string> texts = {render_item_text(item), negative_text};
    auto v = provider.embed_batch(texts);
    return attenuation_from_similarity(cosine_sim(v[0], v[1]), params);
}

double match_score(double s_sem, double s_aia, const ToolParams& params, bool semantic_skipped, bool aia_skipped)
{
    if (semantic_skipped && aia_skipped)
        return 0.0;
    if (semantic_skipped)
        return s_aia;
    if (aia_skipped)
        return s_sem;
    return params.alpha * s_sem + (1.0 - params.alpha) * s_aia;
}

void aggregate(std::vector<FeedEntry>& entries)
{
    for (auto& e : entries)
        e.score.s_final = e.score.s_match + e.score.s_atten;
    sort_entries(entries);
}

ItemIndex::ItemIndex(std::shared_ptr<const Catalog> catalog, std::shared_ptr<const EmbeddingProvider> provider,
                     std::shared_ptr<const AiaModel> model)
    : catalog_(std::move(catalog)), provider_(std::move(provider)), model_(std::move(model))
{
    if (!catalog_ || !provider_ || !model_)
        throw ConfigError("item index needs a catalog, a provider and a model");
    if (model_->text_dim() != provider_->dim())
        throw ConfigError("AIA text dim " + std::to_string(model_->text_dim()) + " != embedding dim " +
                          std::to_string(provider_->dim()));
    if (catalog_->image_dim() != 0 && model_->image_dim() != catalog_->image_dim())
        throw ConfigError("AIA image dim " + std::to_string(model_->image_dim()) + " != catalog image dim " +
                          std::to_string(catalog_->image_dim()));

    const auto n = catalog_->size();
    std::vector<std::string> texts;
    texts.reserve(n);
    for (const auto& item : catalog_->items())
        texts.push_back(render_item_text(item));
    auto vectors = provider_->embed_batch(texts);

    text_ = kernels::RowMatrix(n, provider_->dim());
    fused_ = kernels::RowMatrix(n, model_->params().dim);
    for (std::size_t i = 0; i < n; ++i) {
        std::copy(vectors[i].values().begin(), vectors[i].values().end(), text_.row(i).begin());
        Eigen::Map<const Eigen::VectorXd> t(vectors[i].values().data(), static_cast<Eigen::Index>(vectors[i].dim()));
        const auto& item = catalog_->at(i);
        Eigen::VectorXd fused;
        if (item.image_features) {
            Eigen::Map<const Eigen::VectorXd> img(item.image_features->data(),
                                                  static_cast<Eigen::Index>(item.image_features->size()));
            Eigen::VectorXd image = img;
            fused = model_->fuse(t, &image);
        } else {
            fused = model_->fuse(t, nullptr);
        }
        std::copy(fused.data(), fused.data() + fused.size(), fused_.row(i).begin());
    }
}

Eigen::VectorXd ItemIndex::fused_row(std::size_t index) const
{
    auto r = fused_.row(index);
    return Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
}

AiaEncoding encode_history(const Vector& intent, const UserHistory& history, const ItemIndex& index)
{
    if (history.empty())
        throw PreconditionError("AIA encoding needs a non-empty history");
    const auto d = static_cast<Eigen::Index>(index.model().params().dim);
    Eigen::MatrixXd seq(static_cast<Eigen::Index>(history.size()), d);
    for (std::size_t i = 0; i < history.size(); ++i) {
        auto idx = index.catalog().index_of(history.items()[i]);
        if (!idx)
            throw PreconditionError("history item '" + history.items()[i] + "' not in catalog");
        seq.row(static_cast<Eigen::Index>(i)) = index.fused_row(*idx).transpose();
    }
    Eigen::Map<const Eigen::VectorXd> q(intent.values().data(), static_cast<Eigen::Index>(intent.dim()));
    return index.model().encode(seq, q);
}

AiaResult aia_score(const Item& item, const Vector& intent, const UserHistory& history, const ItemIndex& index)
{
    if (history.empty())
        return {};
    auto idx = index.catalog().index_of(item.id);
    if (!idx)
        throw PreconditionError("item '" + item.id + "' not in catalog");
    auto enc = encode_history(intent, history, index);
    return {index.model().score(enc, index.fused_row(*idx)), false};
}

std::vector<double> aia_scores(std::span<const std::size_t> candidates, const Vector& intent,
                               const UserHistory& history, const ItemIndex& index, kernels::Exec exec)
{
    auto enc = encode_history(intent, history, index);
    return kernels::dot_scores(index.fused(), candidates, std::span<const double>(enc.context.data(), enc.context.size()),
                               exec);
}

} // namespace recfeed
