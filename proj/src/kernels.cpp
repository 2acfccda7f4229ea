#include "recfeed/kernels.hpp"

#include "recfeed/embedding.hpp"
#include "recfeed/error.hpp"

#include <cmath>

namespace recfeed::kernels {

namespace {

bool keeps(const Item& item, const std::vector<Constraint>& positive, const std::vector<Constraint>& negative)
{
    for (const auto& c : positive) {
        if (evaluate(c, item) != MatchResult::holds)
            return false;
    }
    for (const auto& c : negative) {
        if (evaluate(c, item) == MatchResult::holds)
            return false;
    }
    return true;
}

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

void check_dims(const RowMatrix& m, std::span<const std::size_t> rows, std::span<const double> query)
{
    if (query.size() != m.cols)
        throw PreconditionError("query dim " + std::to_string(query.size()) + " != matrix cols " +
                                std::to_string(m.cols));
    for (auto r : rows) {
        if (r >= m.rows)
            throw PreconditionError("row index out of range");
    }
}

} // namespace

std::vector<std::uint8_t> filter_mask_serial(const Catalog& catalog, std::span<const std::size_t> pool,
                                             const std::vector<Constraint>& positive,
                                             const std::vector<Constraint>& negative)
{
    std::vector<std::uint8_t> mask(pool.size(), 0);
    for (std::size_t i = 0; i < pool.size(); ++i)
        mask[i] = keeps(catalog.at(pool[i]), positive, negative) ? 1 : 0;
    return mask;
}

std::vector<std::uint8_t> filter_mask_parallel(const Catalog& catalog, std::span<const std::size_t> pool,
                                               const std::vector<Constraint>& positive,
                                               const std::vector<Constraint>& negative)
{
    std::vector<std::uint8_t> mask(pool.size(), 0);
    const auto n = static_cast<std::ptrdiff_t>(pool.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        auto idx = static_cast<std::size_t>(i);
        mask[idx] = keeps(catalog.at(pool[idx]), positive, negative) ? 1 : 0;
    }
    return mask;
}

std::vector<double> cosine_scores_serial(const RowMatrix& m, std::span<const std::size_t> rows,
                                         std::span<const double> query)
{
    check_dims(m, rows, query);
    std::vector<double> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out[i] = cosine_sim(m.row(rows[i]), query);
    return out;
}

std::vector<double> cosine_scores_parallel(const RowMatrix& m, std::span<const std::size_t> rows,
                                           std::span<const double> query)
{
    check_dims(m, rows, query);
    std::vector<double> out(rows.size());
    const auto n = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        auto idx = static_cast<std::size_t>(i);
        out[idx] = cosine_sim(m.row(rows[idx]), query);
    }
    return out;
}

std::vector<double> dot_scores_serial(const RowMatrix& m, std::span<const std::size_t> rows,
                                      std::span<const double> query)
{
    check_dims(m, rows, query);
    std::vector<double> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out[i] = dot(m.row(rows[i]), query);
    return out;
}

std::vector<double> dot_scores_parallel(const RowMatrix& m, std::span<const std::size_t> rows,
                                        std::span<const double> query)
{
    check_dims(m, rows, query);
    std::vector<double> out(rows.size());
    const auto n = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        auto idx = static_cast<std::size_t>(i);
        out[idx] = dot(m.row(rows[idx]), query);
    }
    return out;
}

std::vector<std::uint8_t> filter_mask(const Catalog& catalog, std::span<const std::size_t> pool,
                                      const std::vector<Constraint>& positive, const std::vector<Constraint>& negative,
                                      Exec exec)
{
    return exec == Exec::serial ? filter_mask_serial(catalog, pool, positive, negative)
                                : filter_mask_parallel(catalog, pool, positive, negative);
}

std::vector<double> cosine_scores(const RowMatrix& m, std::span<const std::size_t> rows, std::span<const double> query,
                                  Exec exec)
{
    return exec == Exec::serial ? cosine_scores_serial(m, rows, query) : cosine_scores_parallel(m, rows, query);
}

std::vector<double> dot_scores(const RowMatrix& m, std::span<const std::size_t> rows, std::span<const double> query,
                               Exec exec)
{
    return exec == Exec::serial ? dot_scores_serial(m, rows, query) : dot_scores_parallel(m, rows, query);
}

} // namespace recfeed::kernels
