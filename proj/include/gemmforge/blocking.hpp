#pragma once

#include <algorithm>
#include <functional>
#include <string_view>

#include "gemmforge/matrix.hpp"

namespace gemmforge {

/// Uniform partition of an m x n x k product into bm x bn x bk blocks. The
/// last block along an axis may be short.
struct BlockPartition {
    index_t m, n, k;
    index_t bm, bn, bk;

    BlockPartition(index_t m, index_t n, index_t k, index_t bm, index_t bn, index_t bk);

    index_t row_blocks() const noexcept { return (m + bm - 1) / bm; }
    index_t col_blocks() const noexcept { return (n + bn - 1) / bn; }
    index_t depth_blocks() const noexcept { return (k + bk - 1) / bk; }

    index_t row_extent(index_t i) const noexcept { return std::min(bm, m - i * bm); }
    index_t col_extent(index_t j) const noexcept { return std::min(bn, n - j * bn); }
    index_t depth_extent(index_t p) const noexcept { return std::min(bk, k - p * bk); }
};

using BlockEngine = std::function<void(ConstMatrixView, ConstMatrixView, MatrixView)>;

/// C_ij += sum_p A_ip B_pj over the blocks of `BlockPartition`, j-blocks
/// outermost, then p-blocks, then i-blocks. Blocks are views into the
/// operands; nothing is copied.
void gemm_blocked(ConstMatrixView a, ConstMatrixView b, MatrixView c, index_t bm, index_t bn,
                  index_t bk, const BlockEngine& inner);

/// As above with the inner engine looked up by name in the default registry.
/// Throws std::invalid_argument for an unknown name.
void gemm_blocked(ConstMatrixView a, ConstMatrixView b, MatrixView c, index_t bm, index_t bn,
                  index_t bk, std::string_view inner);

}  // namespace gemmforge
