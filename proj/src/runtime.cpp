#include "recfeed/runtime.hpp"

#include "recfeed/error.hpp"
#include "recfeed/llm_parser.hpp"

#include <cstdlib>
#include <string>

namespace recfeed {

namespace {

std::optional<std::string> env(const char* name)
{
    const char* v = std::getenv(name);
    if (!v || !*v)
        return std::nullopt;
    return std::string(v);
}

double env_number(const char* name, const std::string& raw)
{
    try {
        std::size_t used = 0;
        double v = std::stod(raw, &used);
        if (used != raw.size())
            throw std::invalid_argument(raw);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(std::string(name) + " is not a number: " + raw);
    }
}

} // namespace

RuntimeOptions options_from_env(RuntimeOptions base)
{
    if (auto v = env("RECFEED_EMBEDDING_ENDPOINT")) {
        base.embedding.kind = ProviderKind::external;
        base.embedding.endpoint = *v;
    }
    if (auto v = env("RECFEED_EMBEDDING_DIM"))
        base.embedding.dim = static_cast<std::size_t>(env_number("RECFEED_EMBEDDING_DIM", *v));
    if (auto v = env("RECFEED_LLM_ENDPOINT"))
        base.llm_endpoint = *v;
    if (auto v = env("RECFEED_LLM_MODEL"))
        base.llm_model = *v;
    if (auto v = env("RECFEED_ALPHA"))
        base.tools.alpha = env_number("RECFEED_ALPHA", *v);
    if (auto v = env("RECFEED_BETA"))
        base.tools.beta = env_number("RECFEED_BETA", *v);
    base.tools.validate();
    base.embedding.validate();
    return base;
}

std::shared_ptr<const ItemIndex> make_index(std::shared_ptr<const Catalog> catalog, const RuntimeOptions& options)
{
    auto provider = make_provider(options.embedding);
    auto model = std::make_shared<const AiaModel>(options.aia, provider->dim(), catalog->image_dim());
    return std::make_shared<const ItemIndex>(std::move(catalog), std::move(provider), std::move(model));
}

std::shared_ptr<const ParserBackend> make_parser(std::shared_ptr<const Catalog> catalog, const RuntimeOptions& options)
{
    if (!options.llm_endpoint.empty()) {
        auto client = std::make_shared<const HttpLlmClient>(options.llm_endpoint, options.llm_model);
        return std::make_shared<const LlmParser>(std::move(catalog), std::move(client));
    }
    return std::make_shared<const RuleParser>(std::move(catalog));
}

std::shared_ptr<SessionEngine> make_engine(std::shared_ptr<const ItemIndex> index, const RuntimeOptions& options)
{
    auto parser = make_parser(index->catalog_ptr(), options);
    auto planner = std::make_shared<const Planner>(index, options.tools, options.mode, options.planner_seed);
    return std::make_shared<SessionEngine>(std::move(parser), std::move(planner));
}

} // namespace recfeed
