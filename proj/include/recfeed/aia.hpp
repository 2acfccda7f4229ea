#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace recfeed {

struct AiaParams {
    std::size_t dim = 32;
    std::size_t heads = 2;
    std::uint64_t seed = 7;

    // Throws ConfigError unless dim > 0 and heads divides dim.
    void validate() const;
};

/**
 * Projection and attention weights. Shapes (d = params.dim):
 * text d x text_dim, image d x image_dim (image_dim may be 0), fuse d x 2d,
 * every attention matrix d x d.
 */
struct AiaWeights {
    Eigen::MatrixXd text;
    Eigen::MatrixXd image;
    Eigen::MatrixXd fuse;
    Eigen::MatrixXd sa_q, sa_k, sa_v, sa_o;
    Eigen::MatrixXd ca_q, ca_k, ca_v, ca_o;
};

struct AiaEncoding {
    // n x d encoded history.
    Eigen::MatrixXd sequence;
    // Per head, n x n row-stochastic self-attention weights.
    std::vector<Eigen::MatrixXd> self_weights;
    // Per head, length-n cross-attention weights of the intent query.
    std::vector<Eigen::VectorXd> cross_weights;
    // Cross-attention output; candidate scores are dot products against it.
    Eigen::VectorXd context;
};

/**
 * Intent-aware sequential scorer: fused multimodal item representations,
 * one multi-head self-attention layer over the history (no positional
 * encoding), then multi-head cross-attention with the projected intent as
 * query. Forward pass only; weights come from a seeded initializer.
 */
class AiaModel {
public:
    // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) from mt19937_64(seed), matrices
    // filled row-major in declaration order of AiaWeights.
    AiaModel(AiaParams params, std::size_t text_dim, std::size_t image_dim);
    AiaModel(AiaParams params, AiaWeights weights);

    const AiaParams& params() const { return params_; }
    std::size_t text_dim() const { return static_cast<std::size_t>(w_.text.cols()); }
    std::size_t image_dim() const { return static_cast<std::size_t>(w_.image.cols()); }
    const AiaWeights& weights() const { return w_; }

    // image may be null (treated as the zero vector).
    Eigen::VectorXd fuse(const Eigen::VectorXd& text_embedding, const Eigen::VectorXd* image) const;

    // history: n x d fused rows, n >= 1; intent: text_dim.
    AiaEncoding encode(const Eigen::MatrixXd& history, const Eigen::VectorXd& intent) const;

    double score(const AiaEncoding& enc, const Eigen::VectorXd& candidate_fused) const;

private:
    void check_shapes() const;

    AiaParams params_;
    AiaWeights w_;
};

} // namespace recfeed
