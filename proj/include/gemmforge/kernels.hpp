#pragma once

// Compute kernels: the triple-loop oracle, a column-ordered variant, the
// register-tiled engine and the packed micro-kernel.
//
// Every kernel computes each contribution as a separate multiply and add and
// visits p in ascending order for every element of C. The library is built
// with -ffp-contract=off so these orders survive compilation; that is what
// makes the bitwise-equality guarantees between engines hold.

#include <array>
#include <span>

#include "gemmforge/matrix.hpp"

namespace gemmforge {

inline constexpr index_t kMaxTile = 12;

/// An mr x nr block of C held in local storage, column-major.
class MicroTile {
public:
    MicroTile(index_t mr, index_t nr);

    index_t mr() const noexcept { return mr_; }
    index_t nr() const noexcept { return nr_; }
    double& operator()(index_t i, index_t j) noexcept { return acc_[j * mr_ + i]; }
    double operator()(index_t i, index_t j) const noexcept { return acc_[j * mr_ + i]; }
    std::span<double> acc() noexcept { return {acc_.data(), mr_ * nr_}; }
    std::span<const double> acc() const noexcept { return {acc_.data(), mr_ * nr_}; }

    /// Copies the valid part of `c` (at most mr x nr); other lanes become 0.
    void load(ConstMatrixView c);
    /// Writes back only the lanes that fall inside `c`.
    void store(MatrixView c) const;

private:
    index_t mr_;
    index_t nr_;
    std::array<double, kMaxTile * kMaxTile> acc_{};
};

/// Throws std::invalid_argument unless A is m x k, B is k x n and C is m x n.
void check_conformal(ConstMatrixView a, ConstMatrixView b, ConstMatrixView c);

/// tile(i, j) += a_col[i] * b_row[j]. Lengths must match the tile.
void rank1_update(MicroTile& tile, std::span<const double> a_col, std::span<const double> b_row);

/// C += A B with loops i, j, p (p innermost). The oracle for every other engine.
void gemm_naive(ConstMatrixView a, ConstMatrixView b, MatrixView c);

/// Same sums as gemm_naive, traversing C and A down columns.
void gemm_colwise(ConstMatrixView a, ConstMatrixView b, MatrixView c);

/// C += A B computed one mr x nr tile of C at a time, each tile loaded once,
/// updated over the whole k extent, and stored once.
void gemm_register_tiled(ConstMatrixView a, ConstMatrixView b, MatrixView c, index_t mr,
                         index_t nr);

/// Packed micro-kernel signature. `a_panel` holds kc columns of length mr
/// (column p at p*mr), `b_panel` holds kc rows of length nr (row p at p*nr).
/// `c` is the target block; it may be smaller than mr x nr at a fringe, in
/// which case only its valid lanes are touched.
using MicroKernelFn = void (*)(index_t kc, const double* a_panel, const double* b_panel,
                               MatrixView c, index_t mr, index_t nr);

/// Reference micro-kernel: a MicroTile driven by kc rank1_update calls.
void micro_kernel(index_t kc, const double* a_panel, const double* b_panel, MatrixView c,
                  index_t mr, index_t nr);

/// Same arithmetic as micro_kernel with mr and nr fixed at compile time, for
/// every 1 <= mr, nr <= kMaxTile.
void micro_kernel_unrolled(index_t kc, const double* a_panel, const double* b_panel, MatrixView c,
                           index_t mr, index_t nr);

}  // namespace gemmforge
