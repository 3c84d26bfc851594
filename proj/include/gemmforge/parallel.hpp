#pragma once

// Deterministic threading for the five-loop engine.
//
// Only loop 3 (ic) or loop 2 (jr) is split across workers. Neither split
// changes the order in which any element of C accumulates its products, so
// the threaded result is bitwise identical to the serial one. The pc loop
// carries the reduction into C and is never split.

#include <string>
#include <string_view>
#include <vector>

#include "gemmforge/goto.hpp"

namespace gemmforge {

inline constexpr index_t kMaxThreads = 256;

enum class LoopChoice { ic, jr };

std::string_view to_string(LoopChoice loop) noexcept;
/// Accepts "ic" or "jr"; throws std::invalid_argument otherwise.
LoopChoice parse_loop_choice(std::string_view text);

/// Half-open range of loop iterations (not element offsets).
struct IterRange {
    index_t begin = 0;
    index_t end = 0;
    index_t size() const noexcept { return end - begin; }
    bool operator==(const IterRange&) const = default;
};

struct ParallelPlan {
    LoopChoice loop = LoopChoice::ic;
    index_t threads = 1;
    /// One contiguous range per worker; trailing ranges may be empty.
    std::vector<IterRange> partition;
};

/// Static split of ceil(extent / step) iterations over `threads` workers.
/// The first (q mod threads) workers take one extra iteration.
ParallelPlan make_plan(LoopChoice loop, index_t threads, index_t extent, index_t step);

/// Five-loop GEMM with loop `loop` split over `threads` workers. For ic, one
/// worker packs each B block behind a barrier and every worker packs its own
/// A blocks. For jr, one worker packs both blocks and a barrier precedes
/// loop 2. Throws std::invalid_argument if threads is 0 or above kMaxThreads.
void gemm_goto_parallel(ConstMatrixView a, ConstMatrixView b, MatrixView c,
                        const GotoParams& params, LoopChoice loop, index_t threads,
                        GotoStats* stats = nullptr);

}  // namespace gemmforge
