#pragma once

#include "recfeed/catalog.hpp"
#include "recfeed/preference.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

// Per-item hot loops. Each kernel has a serial reference and an OpenMP
// variant; the two must agree exactly.
namespace recfeed::kernels {

enum class Exec { serial, parallel };

/**
 * Dense row-major matrix of item vectors.
 */
struct RowMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    RowMatrix() = default;
    RowMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
};

// 1 where the item at pool[i] satisfies every positive constraint (missing
// attribute fails) and violates no negative one (missing attribute passes).
std::vector<std::uint8_t> filter_mask_serial(const Catalog& catalog, std::span<const std::size_t> pool,
                                             const std::vector<Constraint>& positive,
                                             const std::vector<Constraint>& negative);
std::vector<std::uint8_t> filter_mask_parallel(const Catalog& catalog, std::span<const std::size_t> pool,
                                               const std::vector<Constraint>& positive,
                                               const std::vector<Constraint>& negative);

// Cosine of each selected row against query, 0 for zero vectors.
std::vector<double> cosine_scores_serial(const RowMatrix& m, std::span<const std::size_t> rows,
                                         std::span<const double> query);
std::vector<double> cosine_scores_parallel(const RowMatrix& m, std::span<const std::size_t> rows,
                                           std::span<const double> query);

std::vector<double> dot_scores_serial(const RowMatrix& m, std::span<const std::size_t> rows,
                                      std::span<const double> query);
std::vector<double> dot_scores_parallel(const RowMatrix& m, std::span<const std::size_t> rows,
                                        std::span<const double> query);

std::vector<std::uint8_t> filter_mask(const Catalog& catalog, std::span<const std::size_t> pool,
                                      const std::vector<Constraint>& positive, const std::vector<Constraint>& negative,
                                      Exec exec = Exec::parallel);
std::vector<double> cosine_scores(const RowMatrix& m, std::span<const std::size_t> rows, std::span<const double> query,
                                  Exec exec = Exec::parallel);
std::vector<double> dot_scores(const RowMatrix& m, std::span<const std::size_t> rows, std::span<const double> query,
                               Exec exec = Exec::parallel);

} // namespace recfeed::kernels
