#include "gemmforge/kernels.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace gemmforge {

namespace {

std::string dims(ConstMatrixView x) {
    return std::to_string(x.rows()) + "x" + std::to_string(x.cols());
}

void check_tile_dims(index_t mr, index_t nr) {
    if (mr < 1 || mr > kMaxTile || nr < 1 || nr > kMaxTile) {
        throw std::invalid_argument("tile " + std::to_string(mr) + "x" + std::to_string(nr) +
                                    " outside 1.." + std::to_string(kMaxTile));
    }
}

}  // namespace

MicroTile::MicroTile(index_t mr, index_t nr) : mr_(mr), nr_(nr) { check_tile_dims(mr, nr); }

void MicroTile::load(ConstMatrixView c) {
    std::fill(acc_.begin(), acc_.end(), 0.0);
    const index_t rows = std::min(mr_, c.rows());
    const index_t cols = std::min(nr_, c.cols());
    for (index_t j = 0; j < cols; ++j)
        for (index_t i = 0; i < rows; ++i) (*this)(i, j) = c(i, j);
}

void MicroTile::store(MatrixView c) const {
    const index_t rows = std::min(mr_, c.rows());
    const index_t cols = std::min(nr_, c.cols());
    for (index_t j = 0; j < cols; ++j)
        for (index_t i = 0; i < rows; ++i) c(i, j) = (*this)(i, j);
}

void check_conformal(ConstMatrixView a, ConstMatrixView b, ConstMatrixView c) {
    if (a.rows() != c.rows() || b.cols() != c.cols() || a.cols() != b.rows() || a.rows() == 0 ||
        b.cols() == 0 || a.cols() == 0) {
        throw std::invalid_argument("non-conformal operands: A " + dims(a) + ", B " + dims(b) +
                                    ", C " + dims(c));
    }
}

void rank1_update(MicroTile& tile, std::span<const double> a_col, std::span<const double> b_row) {
    if (a_col.size() != tile.mr() || b_row.size() != tile.nr()) {
        throw std::invalid_argument("rank1_update: vector lengths do not match the tile");
    }
    for (index_t j = 0; j < tile.nr(); ++j) {
        const double bj = b_row[j];
        for (index_t i = 0; i < tile.mr(); ++i) {
            const double prod = a_col[i] * bj;
            tile(i, j) = tile(i, j) + prod;
        }
    }
}

void gemm_naive(ConstMatrixView a, ConstMatrixView b, MatrixView c) {
    check_conformal(a, b, c);
    const index_t m = c.rows(), n = c.cols(), k = a.cols();
    for (index_t i = 0; i < m; ++i)
        for (index_t j = 0; j < n; ++j)
            for (index_t p = 0; p < k; ++p) c(i, j) += a(i, p) * b(p, j);
}

void gemm_colwise(ConstMatrixView a, ConstMatrixView b, MatrixView c) {
    check_conformal(a, b, c);
    const index_t m = c.rows(), n = c.cols(), k = a.cols();
    for (index_t j = 0; j < n; ++j) {
        double* cj = c.col(j);
        for (index_t p = 0; p < k; ++p) {
            const double* ap = a.col(p);
            const double bpj = b(p, j);
            for (index_t i = 0; i < m; ++i) cj[i] += ap[i] * bpj;
        }
    }
}

void gemm_register_tiled(ConstMatrixView a, ConstMatrixView b, MatrixView c, index_t mr,
                         index_t nr) {
    check_conformal(a, b, c);
    check_tile_dims(mr, nr);
    const index_t m = c.rows(), n = c.cols(), k = a.cols();

    MicroTile tile(mr, nr);
    std::array<double, kMaxTile> a_col{};
    std::array<double, kMaxTile> b_row{};
    for (index_t j0 = 0; j0 < n; j0 += nr) {
        const index_t nj = std::min(nr, n - j0);
        for (index_t i0 = 0; i0 < m; i0 += mr) {
            const index_t mi = std::min(mr, m - i0);
            MatrixView c_block = sub_view(c, i0, j0, mi, nj);
            tile.load(c_block);
            for (index_t p = 0; p < k; ++p) {
                // fringe lanes stay zero
                for (index_t i = 0; i < mi; ++i) a_col[i] = a(i0 + i, p);
                for (index_t j = 0; j < nj; ++j) b_row[j] = b(p, j0 + j);
                rank1_update(tile, {a_col.data(), mr}, {b_row.data(), nr});
            }
            tile.store(c_block);
        }
    }
}

void micro_kernel(index_t kc, const double* a_panel, const double* b_panel, MatrixView c,
                  index_t mr, index_t nr) {
    MicroTile tile(mr, nr);
    tile.load(c);
    for (index_t p = 0; p < kc; ++p) {
        rank1_update(tile, {a_panel + p * mr, mr}, {b_panel + p * nr, nr});
    }
    tile.store(c);
}

namespace {

template <index_t MR, index_t NR>
void micro_kernel_fixed(index_t kc, const double* __restrict a_panel,
                        const double* __restrict b_panel, MatrixView c) {
    double acc[NR][MR] = {};
    const index_t rows = std::min(MR, c.rows());
    const index_t cols = std::min(NR, c.cols());
    const bool full = rows == MR && cols == NR;

    if (full) {
        for (index_t j = 0; j < NR; ++j)
            for (index_t i = 0; i < MR; ++i) acc[j][i] = c(i, j);
    } else {
        for (index_t j = 0; j < cols; ++j)
            for (index_t i = 0; i < rows; ++i) acc[j][i] = c(i, j);
    }

    for (index_t p = 0; p < kc; ++p) {
        const double* ap = a_panel + p * MR;
        const double* bp = b_panel + p * NR;
        for (index_t j = 0; j < NR; ++j) {
            const double bj = bp[j];
            for (index_t i = 0; i < MR; ++i) {
                const double prod = ap[i] * bj;
                acc[j][i] = acc[j][i] + prod;
            }
        }
    }

    if (full) {
        for (index_t j = 0; j < NR; ++j)
            for (index_t i = 0; i < MR; ++i) c(i, j) = acc[j][i];
    } else {
        for (index_t j = 0; j < cols; ++j)
            for (index_t i = 0; i < rows; ++i) c(i, j) = acc[j][i];
    }
}

using FixedKernel = void (*)(index_t, const double*, const double*, MatrixView);

template <std::size_t... Is>
constexpr auto make_kernel_table(std::index_sequence<Is...>) {
    return std::array<FixedKernel, sizeof...(Is)>{
        &micro_kernel_fixed<Is / kMaxTile + 1, Is % kMaxTile + 1>...};
}

constexpr auto kFixedKernels = make_kernel_table(std::make_index_sequence<kMaxTile * kMaxTile>{});

}  // namespace

void micro_kernel_unrolled(index_t kc, const double* a_panel, const double* b_panel, MatrixView c,
                           index_t mr, index_t nr) {
    check_tile_dims(mr, nr);
    kFixedKernels[(mr - 1) * kMaxTile + (nr - 1)](kc, a_panel, b_panel, c);
}

}  // namespace gemmforge
