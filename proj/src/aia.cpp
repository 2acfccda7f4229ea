#include "recfeed/aia.hpp"

#include "recfeed/error.hpp"

#include <cmath>
#include <random>

namespace recfeed {

void AiaParams::validate() const
{
    if (dim == 0 || heads == 0)
        throw ConfigError("AIA dim and heads must be positive");
    if (dim % heads != 0)
        throw ConfigError("AIA heads (" + std::to_string(heads) + ") must divide dim (" + std::to_string(dim) + ")");
}

namespace {

Eigen::MatrixXd uniform_init(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols)
{
    Eigen::MatrixXd m(rows, cols);
    if (cols == 0)
        return m;
    const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            m(r, c) = (2.0 * u - 1.0) * bound;
        }
    }
    return m;
}

// Row-wise softmax with max subtraction.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits)
{
    Eigen::MatrixXd out(logits.rows(), logits.cols());
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        double mx = logits.row(r).maxCoeff();
        Eigen::RowVectorXd e = (logits.row(r).array() - mx).exp().matrix();
        out.row(r) = e / e.sum();
    }
    return out;
}

void check(const Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols, const char* name)
{
    if (m.rows() != rows || m.cols() != cols)
        throw ConfigError(std::string("AIA weight ") + name + " has shape " + std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()) + ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
    if (!m.allFinite())
        throw ConfigError(std::string("AIA weight ") + name + " has non-finite entries");
}

} // namespace

AiaModel::AiaModel(AiaParams params, std::size_t text_dim, std::size_t image_dim) : params_(params)
{
    params_.validate();
    if (text_dim == 0)
        throw ConfigError("AIA text dim must be positive");
    const auto d = static_cast<Eigen::Index>(params_.dim);
    std::mt19937_64 rng(params_.seed);
    w_.text = uniform_init(rng, d, static_cast<Eigen::Index>(text_dim));
    w_.image = uniform_init(rng, d, static_cast<Eigen::Index>(image_dim));
    w_.fuse = uniform_init(rng, d, 2 * d);
    w_.sa_q = uniform_init(rng, d, d);
    w_.sa_k = uniform_init(rng, d, d);
    w_.sa_v = uniform_init(rng, d, d);
    w_.sa_o = uniform_init(rng, d, d);
    w_.ca_q = uniform_init(rng, d, d);
    w_.ca_k = uniform_init(rng, d, d);
    w_.ca_v = uniform_init(rng, d, d);
    w_.ca_o = uniform_init(rng, d, d);
}

AiaModel::AiaModel(AiaParams params, AiaWeights weights) : params_(params), w_(std::move(weights))
{
    params_.validate();
    check_shapes();
}

void AiaModel::check_shapes() const
{
    const auto d = static_cast<Eigen::Index>(params_.dim);
    if (w_.text.cols() == 0)
        throw ConfigError("AIA text projection has no columns");
    check(w_.text, d, w_.text.cols(), "text");
    check(w_.image, d, w_.image.cols(), "image");
    check(w_.fuse, d, 2 * d, "fuse");
    for (auto [m, name] : {std::pair{&w_.sa_q, "sa_q"}, {&w_.sa_k, "sa_k"}, {&w_.sa_v, "sa_v"}, {&w_.sa_o, "sa_o"},
                           {&w_.ca_q, "ca_q"}, {&w_.ca_k, "ca_k"}, {&w_.ca_v, "ca_v"}, {&w_.ca_o, "ca_o"}})
        check(*m, d, d, name);
}

Eigen::VectorXd AiaModel::fuse(const Eigen::VectorXd& text_embedding, const Eigen::VectorXd* image) const
{
    if (text_embedding.size() != w_.text.cols())
        throw ConfigError("text embedding dim " + std::to_string(text_embedding.size()) + " != AIA text dim " +
                          std::to_string(w_.text.cols()));
    const auto d = static_cast<Eigen::Index>(params_.dim);
    Eigen::VectorXd concat = Eigen::VectorXd::Zero(2 * d);
    concat.head(d) = w_.text * text_embedding;
    if (image && w_.image.cols() > 0) {
        if (image->size() != w_.image.cols())
            throw ConfigError("image feature dim mismatch");
        concat.tail(d) = w_.image * *image;
    }
    return w_.fuse * concat;
}

AiaEncoding AiaModel::encode(const Eigen::MatrixXd& history, const Eigen::VectorXd& intent) const
{
    const auto d = static_cast<Eigen::Index>(params_.dim);
    const auto h = static_cast<Eigen::Index>(params_.heads);
    const Eigen::Index dh = d / h;
    if (history.rows() == 0 || history.cols() != d)
        throw PreconditionError("AIA history must be a non-empty n x d matrix");
    if (intent.size() != w_.text.cols())
        throw PreconditionError("intent dim does not match the text modality");
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    const Eigen::Index n = history.rows();

    AiaEncoding enc;
    Eigen::MatrixXd q = history * w_.sa_q.transpose();
    Eigen::MatrixXd k = history * w_.sa_k.transpose();
    Eigen::MatrixXd v = history * w_.sa_v.transpose();
    Eigen::MatrixXd heads_out(n, d);
    for (Eigen::Index i = 0; i < h; ++i) {
        Eigen::MatrixXd logits = q.middleCols(i * dh, dh) * k.middleCols(i * dh, dh).transpose() * scale;
        Eigen::MatrixXd weights = softmax_rows(logits);
        heads_out.middleCols(i * dh, dh) = weights * v.middleCols(i * dh, dh);
        enc.self_weights.push_back(std::move(weights));
    }
    enc.sequence = heads_out * w_.sa_o.transpose();

    Eigen::VectorXd h_intent = w_.text * intent;
    Eigen::VectorXd cq = w_.ca_q * h_intent;
    Eigen::MatrixXd ck = enc.sequence * w_.ca_k.transpose();
    Eigen::MatrixXd cv = enc.sequence * w_.ca_v.transpose();
    Eigen::VectorXd attended(d);
    for (Eigen::Index i = 0; i < h; ++i) {
        Eigen::MatrixXd logits = (cq.segment(i * dh, dh).transpose() * ck.middleCols(i * dh, dh).transpose()) * scale;
        Eigen::VectorXd weights = softmax_rows(logits).row(0).transpose();
        attended.segment(i * dh, dh) = cv.middleCols(i * dh, dh).transpose() * weights;
        enc.cross_weights.push_back(std::move(weights));
    }
    enc.context = w_.ca_o * attended;
    return enc;
}

double AiaModel::score(const AiaEncoding& enc, const Eigen::VectorXd& candidate_fused) const
{
    if (candidate_fused.size() != enc.context.size())
        throw PreconditionError("candidate representation dim mismatch");
    return enc.context.dot(candidate_fused);
}

} // namespace recfeed
