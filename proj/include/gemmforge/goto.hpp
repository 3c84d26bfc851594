#pragma once

// Five-loop packed GEMM in the style of GotoBLAS / BLIS.
//
//   loop 5  jc over n  step nc      B block   kc' x nc'  packed once per (jc, pc)
//   loop 4  pc over k  step kc
//   loop 3  ic over m  step mc      A block   mc' x kc'  packed once per (jc, pc, ic)
//   loop 2  jr over nc' step nr
//   loop 1  ir over mc' step mr     micro-kernel on one mr x nr block of C
//
// Ragged edges are handled by zero-padded panels and masked writeback; the
// depth kc' is never padded.

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gemmforge/matrix.hpp"

namespace gemmforge {

struct GotoParams {
    index_t mc = 64;
    index_t nc = 4096;
    index_t kc = 256;
    index_t mr = 4;
    index_t nr = 4;
    std::string micro_kernel = "unrolled";

    bool operator==(const GotoParams&) const = default;
};

/// Contiguous micro-panel copy of an A block (panels of mr rows, stored
/// column by column) or a B block (panels of nr columns, stored row by row).
/// Lanes past the source edge hold exactly 0.0.
class PackedBlock {
public:
    enum class Kind { A, B };

    PackedBlock() = default;

    Kind kind() const noexcept { return kind_; }
    index_t panel_len() const noexcept { return panel_len_; }
    index_t depth() const noexcept { return depth_; }
    index_t panel_count() const noexcept { return panel_count_; }
    /// Valid lanes in the last panel (equal to panel_len when it is full).
    index_t valid_tail() const noexcept { return valid_tail_; }
    index_t source_rows() const noexcept { return source_rows_; }
    index_t source_cols() const noexcept { return source_cols_; }

    std::span<const double> buffer() const noexcept {
        return {buffer_.data(), panel_count_ * panel_len_ * depth_};
    }
    const double* panel(index_t q) const noexcept {
        return buffer_.data() + q * panel_len_ * depth_;
    }

    /// Grows the backing store to at least `count` doubles.
    void reserve(std::size_t count);

private:
    friend void pack_a_into(ConstMatrixView, index_t, PackedBlock&);
    friend void pack_b_into(ConstMatrixView, index_t, PackedBlock&);

    Kind kind_ = Kind::A;
    index_t panel_len_ = 0;
    index_t depth_ = 0;
    index_t panel_count_ = 0;
    index_t valid_tail_ = 0;
    index_t source_rows_ = 0;
    index_t source_cols_ = 0;
    AlignedBuffer buffer_;
};

/// Element (i, p) of `a` lands in panel i / mr at offset p * mr + i % mr.
PackedBlock pack_a(ConstMatrixView a, index_t mr);
/// Element (p, j) of `b` lands in panel j / nr at offset p * nr + j % nr.
PackedBlock pack_b(ConstMatrixView b, index_t nr);

/// Packing into an existing block; storage is reused when large enough.
void pack_a_into(ConstMatrixView a, index_t mr, PackedBlock& out);
void pack_b_into(ConstMatrixView b, index_t nr, PackedBlock& out);

/// Inverse of packing. Throws std::invalid_argument if `dest` does not have
/// the source shape.
void unpack(const PackedBlock& block, MatrixView dest);

/// Records which worker wrote each element of C.
class WriteCensus {
public:
    WriteCensus(index_t rows, index_t cols);

    void record(int worker, index_t i0, index_t j0, index_t rows, index_t cols);

    /// True when every element was written, always by the same worker.
    bool single_writer() const;
    int owner(index_t i, index_t j) const { return owner_[j * rows_ + i].load(); }
    std::uint64_t writes(index_t i, index_t j) const { return writes_[j * rows_ + i].load(); }

private:
    index_t rows_;
    index_t cols_;
    std::unique_ptr<std::atomic<int>[]> owner_;
    std::unique_ptr<std::atomic<std::uint64_t>[]> writes_;
    std::atomic<bool> conflict_{false};
};

/// Optional instrumentation for gemm_goto and gemm_goto_parallel.
struct GotoStats {
    std::atomic<std::uint64_t> pack_a_calls{0};
    std::atomic<std::uint64_t> pack_b_calls{0};
    std::atomic<std::uint64_t> kernel_calls{0};
    WriteCensus* census = nullptr;
};

/// C += A B via the five-loop nest. Throws std::invalid_argument on
/// non-conformal operands or parameters that fail validation.
void gemm_goto(ConstMatrixView a, ConstMatrixView b, MatrixView c, const GotoParams& params,
               GotoStats* stats = nullptr);

}  // namespace gemmforge
