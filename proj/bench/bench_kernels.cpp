#include "recfeed/kernels.hpp"
#include "recfeed/runtime.hpp"
#include "recfeed/synthetic.hpp"

#include <benchmark/benchmark.h>

#include <numeric>

using namespace recfeed;

namespace {

struct Fixture {
    std::shared_ptr<const Catalog> catalog = make_synthetic_catalog(42);
    std::shared_ptr<const ItemIndex> index = make_index(catalog, RuntimeOptions{});
    std::vector<std::size_t> pool;
    std::vector<Constraint> positive;
    std::vector<Constraint> negative;
    std::vector<double> query;

    Fixture()
    {
        pool.resize(catalog->size());
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        positive.push_back(Constraint{"price", Op::between, {AttributeValue::number(40), AttributeValue::number(140)},
                                      Strictness::hard, Polarity::positive, 1});
        positive.push_back(Constraint{"color", Op::equals, {AttributeValue::text("red"), AttributeValue::text("teal")},
                                      Strictness::hard, Polarity::positive, 1});
        negative.push_back(Constraint{"brand", Op::equals, {AttributeValue::text("acme")}, Strictness::hard,
                                      Polarity::negative, 2});
        auto q = index->provider().embed("brand: [zenith], style_hint: [cozy vintage]");
        query = q.values();
    }
};

const Fixture& fixture()
{
    static const Fixture f;
    return f;
}

void BM_FilterSerial(benchmark::State& state)
{
    const auto& f = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(kernels::filter_mask_serial(*f.catalog, f.pool, f.positive, f.negative));
}

void BM_FilterParallel(benchmark::State& state)
{
    const auto& f = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(kernels::filter_mask_parallel(*f.catalog, f.pool, f.positive, f.negative));
}

void BM_CosineSerial(benchmark::State& state)
{
    const auto& f = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(kernels::cosine_scores_serial(f.index->text_embeddings(), f.pool, f.query));
}

void BM_CosineParallel(benchmark::State& state)
{
    const auto& f = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(kernels::cosine_scores_parallel(f.index->text_embeddings(), f.pool, f.query));
}

void BM_DotSerial(benchmark::State& state)
{
    const auto& f = fixture();
    std::vector<double> q(f.index->fused().cols, 0.25);
    for (auto _ : state)
        benchmark::DoNotOptimize(kernels::dot_scores_serial(f.index->fused(), f.pool, q));
}

void BM_DotParallel(benchmark::State& state)
{
    const auto& f = fixture();
    std::vector<double> q(f.index->fused().cols, 0.25);
    for (auto _ : state)
        benchmark::DoNotOptimize(kernels::dot_scores_parallel(f.index->fused(), f.pool, q));
}

} // namespace

BENCHMARK(BM_FilterSerial);
BENCHMARK(BM_FilterParallel);
BENCHMARK(BM_CosineSerial);
BENCHMARK(BM_CosineParallel);
BENCHMARK(BM_DotSerial);
BENCHMARK(BM_DotParallel);

BENCHMARK_MAIN();
