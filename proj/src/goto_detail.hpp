#pragma once

// Loop bodies shared by the serial and threaded five-loop engines.

#include "gemmforge/goto.hpp"
#include "gemmforge/kernels.hpp"

namespace gemmforge::detail {

struct GotoRun {
    ConstMatrixView a;
    ConstMatrixView b;
    MatrixView c;
    const GotoParams& params;
    MicroKernelFn kernel;
    GotoStats* stats;
};

/// Validates operands and params, and resolves the micro-kernel.
GotoRun prepare_goto(ConstMatrixView a, ConstMatrixView b, MatrixView c, const GotoParams& params,
                     GotoStats* stats);

inline index_t round_up(index_t x, index_t step) { return (x + step - 1) / step * step; }

/// Workspace (doubles) for one packed A block and one packed B block.
index_t a_workspace(const GotoRun& run);
index_t b_workspace(const GotoRun& run);

void pack_a_block(const GotoRun& run, index_t ic, index_t pc, index_t mc_eff, index_t kc_eff,
                  PackedBlock& out);
void pack_b_block(const GotoRun& run, index_t pc, index_t jc, index_t kc_eff, index_t nc_eff,
                  PackedBlock& out);

/// Loops 2 and 1 for the jr iterations [jr_begin, jr_end) (counted in steps
/// of nr) over one packed pair whose C block starts at (ic, jc).
void macro_kernel(const GotoRun& run, const PackedBlock& a_packed, const PackedBlock& b_packed,
                  index_t ic, index_t jc, index_t jr_begin, index_t jr_end, int worker);

}  // namespace gemmforge::detail
