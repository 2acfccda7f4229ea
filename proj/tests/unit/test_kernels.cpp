#include <doctest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "recfeed/kernels.hpp"

#include <numeric>

using namespace recfeed;
using namespace recfeed::testing;

TEST_CASE("parallel filter mask equals the serial reference")
{
    std::mt19937_64 rng(21);
    for (int i = 0; i < 30; ++i) {
        auto inst = random_filter_instance(rng, 800, 6);
        auto s = kernels::filter_mask_serial(*inst.catalog, inst.pool, inst.positive, inst.negative);
        auto p = kernels::filter_mask_parallel(*inst.catalog, inst.pool, inst.positive, inst.negative);
        REQUIRE(s == p);
        REQUIRE(s.size() == inst.pool.size());
    }
}

TEST_CASE("parallel score kernels equal the serial reference bit for bit")
{
    std::mt19937_64 rng(22);
    std::normal_distribution<double> g;
    kernels::RowMatrix m(500, 24);
    for (auto& x : m.data)
        x = g(rng);
    for (std::size_t j = 0; j < m.cols; ++j)
        m.row(7)[j] = 0.0;
    std::vector<std::size_t> rows(m.rows);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    std::shuffle(rows.begin(), rows.end(), rng);
    rows.resize(400);
    std::vector<double> q(m.cols);
    for (auto& x : q)
        x = g(rng);

    auto cs = kernels::cosine_scores_serial(m, rows, q);
    auto cp = kernels::cosine_scores_parallel(m, rows, q);
    auto ds = kernels::dot_scores_serial(m, rows, q);
    auto dp = kernels::dot_scores_parallel(m, rows, q);
    CHECK(cs == cp);
    CHECK(ds == dp);

    for (std::size_t i = 0; i < rows.size(); ++i) {
        double dot = 0, nq = 0, nr = 0;
        for (std::size_t j = 0; j < m.cols; ++j) {
            dot += m.row(rows[i])[j] * q[j];
            nq += q[j] * q[j];
            nr += m.row(rows[i])[j] * m.row(rows[i])[j];
        }
        CHECK(ds[i] == doctest::Approx(dot).epsilon(1e-12));
        CHECK(cs[i] == doctest::Approx(nr == 0 ? 0.0 : dot / std::sqrt(nq * nr)).epsilon(1e-12));
    }
}

TEST_CASE("filter mask follows the missing-attribute rule")
{
    auto cat = mini_catalog();
    std::vector<std::size_t> pool(cat->size());
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    auto neg = make_constraint("color", Op::equals, {txt("red")}, Strictness::hard, Polarity::negative);
    auto pos = make_constraint("color", Op::contains, {txt("")});
    auto mask_neg = kernels::filter_mask(*cat, pool, {}, {neg}, kernels::Exec::serial);
    auto mask_pos = kernels::filter_mask(*cat, pool, {pos}, {}, kernels::Exec::serial);
    auto b3 = *cat->index_of("b3");
    CHECK(mask_neg[b3] == 1);
    CHECK(mask_pos[b3] == 0);
    CHECK(mask_neg[*cat->index_of("d1")] == 0);
}
