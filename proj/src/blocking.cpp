#include "gemmforge/blocking.hpp"

#include <string>

#include "gemmforge/kernels.hpp"
#include "gemmforge/registry.hpp"

namespace gemmforge {

BlockPartition::BlockPartition(index_t m_, index_t n_, index_t k_, index_t bm_, index_t bn_,
                               index_t bk_)
    : m(m_), n(n_), k(k_), bm(bm_), bn(bn_), bk(bk_) {
    if (bm == 0 || bn == 0 || bk == 0) throw std::invalid_argument("block sizes must be >= 1");
}

void gemm_blocked(ConstMatrixView a, ConstMatrixView b, MatrixView c, index_t bm, index_t bn,
                  index_t bk, const BlockEngine& inner) {
    check_conformal(a, b, c);
    const BlockPartition part(c.rows(), c.cols(), a.cols(), bm, bn, bk);

    for (index_t jb = 0; jb < part.col_blocks(); ++jb) {
        const index_t j0 = jb * bn, nj = part.col_extent(jb);
        for (index_t pb = 0; pb < part.depth_blocks(); ++pb) {
            const index_t p0 = pb * bk, kp = part.depth_extent(pb);
            const ConstMatrixView b_block = sub_view(b, p0, j0, kp, nj);
            for (index_t ib = 0; ib < part.row_blocks(); ++ib) {
                const index_t i0 = ib * bm, mi = part.row_extent(ib);
                inner(sub_view(a, i0, p0, mi, kp), b_block, sub_view(c, i0, j0, mi, nj));
            }
        }
    }
}

void gemm_blocked(ConstMatrixView a, ConstMatrixView b, MatrixView c, index_t bm, index_t bn,
                  index_t bk, std::string_view inner) {
    const BlockEngine engine = default_registry().block_engine(inner);
    gemm_blocked(a, b, c, bm, bn, bk, engine);
}

}  // namespace gemmforge
