#pragma once

#include "recfeed/aia.hpp"
#include "recfeed/embedding.hpp"
#include "recfeed/planner.hpp"
#include "recfeed/session.hpp"
#include "recfeed/tools.hpp"

#include <memory>
#include <string>

namespace recfeed {

struct RuntimeOptions {
    EmbeddingProviderConfig embedding;
    ToolParams tools;
    AiaParams aia;
    PlannerMode mode = PlannerMode::full;
    std::uint64_t planner_seed = 0;
    // Non-empty selects the LLM parser backend.
    std::string llm_endpoint;
    std::string llm_model = "gpt-4.1";
};

// RECFEED_EMBEDDING_ENDPOINT, RECFEED_EMBEDDING_DIM, RECFEED_LLM_ENDPOINT,
// RECFEED_LLM_MODEL, RECFEED_ALPHA, RECFEED_BETA override the given options.
RuntimeOptions options_from_env(RuntimeOptions base = {});

std::shared_ptr<const ItemIndex> make_index(std::shared_ptr<const Catalog> catalog, const RuntimeOptions& options);
std::shared_ptr<const ParserBackend> make_parser(std::shared_ptr<const Catalog> catalog, const RuntimeOptions& options);
std::shared_ptr<SessionEngine> make_engine(std::shared_ptr<const ItemIndex> index, const RuntimeOptions& options);

} // namespace recfeed
