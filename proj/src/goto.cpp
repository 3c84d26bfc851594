#include "gemmforge/goto.hpp"

#include <algorithm>
#include <string>

#include "gemmforge/config.hpp"
#include "gemmforge/registry.hpp"
#include "goto_detail.hpp"

namespace gemmforge {

void PackedBlock::reserve(std::size_t count) {
    if (buffer_.size() < count) buffer_ = AlignedBuffer(count);
}

void pack_a_into(ConstMatrixView a, index_t mr, PackedBlock& out) {
    if (mr == 0) throw std::invalid_argument("pack_a: mr must be >= 1");
    const index_t rows = a.rows(), depth = a.cols();
    const index_t panels = (rows + mr - 1) / mr;
    out.reserve(panels * mr * depth);
    out.kind_ = PackedBlock::Kind::A;
    out.panel_len_ = mr;
    out.depth_ = depth;
    out.panel_count_ = panels;
    out.valid_tail_ = rows - (panels - 1) * mr;
    out.source_rows_ = rows;
    out.source_cols_ = depth;

    double* dst = out.buffer_.data();
    for (index_t q = 0; q < panels; ++q) {
        const index_t i0 = q * mr;
        const index_t lanes = std::min(mr, rows - i0);
        for (index_t p = 0; p < depth; ++p) {
            const double* src = a.col(p) + i0;
            index_t i = 0;
            for (; i < lanes; ++i) *dst++ = src[i];
            for (; i < mr; ++i) *dst++ = 0.0;
        }
    }
}

void pack_b_into(ConstMatrixView b, index_t nr, PackedBlock& out) {
    if (nr == 0) throw std::invalid_argument("pack_b: nr must be >= 1");
    const index_t depth = b.rows(), cols = b.cols();
    const index_t panels = (cols + nr - 1) / nr;
    out.reserve(panels * nr * depth);
    out.kind_ = PackedBlock::Kind::B;
    out.panel_len_ = nr;
    out.depth_ = depth;
    out.panel_count_ = panels;
    out.valid_tail_ = cols - (panels - 1) * nr;
    out.source_rows_ = depth;
    out.source_cols_ = cols;

    double* dst = out.buffer_.data();
    for (index_t q = 0; q < panels; ++q) {
        const index_t j0 = q * nr;
        const index_t lanes = std::min(nr, cols - j0);
        for (index_t p = 0; p < depth; ++p) {
            index_t j = 0;
            for (; j < lanes; ++j) *dst++ = b(p, j0 + j);
            for (; j < nr; ++j) *dst++ = 0.0;
        }
    }
}

PackedBlock pack_a(ConstMatrixView a, index_t mr) {
    PackedBlock out;
    pack_a_into(a, mr, out);
    return out;
}

PackedBlock pack_b(ConstMatrixView b, index_t nr) {
    PackedBlock out;
    pack_b_into(b, nr, out);
    return out;
}

void unpack(const PackedBlock& block, MatrixView dest) {
    if (dest.rows() != block.source_rows() || dest.cols() != block.source_cols()) {
        throw std::invalid_argument("unpack: destination is " + std::to_string(dest.rows()) + "x" +
                                    std::to_string(dest.cols()) + ", packed source was " +
                                    std::to_string(block.source_rows()) + "x" +
                                    std::to_string(block.source_cols()));
    }
    const index_t len = block.panel_len();
    if (block.kind() == PackedBlock::Kind::A) {
        for (index_t j = 0; j < dest.cols(); ++j)
            for (index_t i = 0; i < dest.rows(); ++i)
                dest(i, j) = block.panel(i / len)[j * len + i % len];
    } else {
        for (index_t j = 0; j < dest.cols(); ++j)
            for (index_t p = 0; p < dest.rows(); ++p)
                dest(p, j) = block.panel(j / len)[p * len + j % len];
    }
}

WriteCensus::WriteCensus(index_t rows, index_t cols)
    : rows_(rows),
      cols_(cols),
      owner_(std::make_unique<std::atomic<int>[]>(rows * cols)),
      writes_(std::make_unique<std::atomic<std::uint64_t>[]>(rows * cols)) {
    for (index_t x = 0; x < rows * cols; ++x) {
        owner_[x].store(-1);
        writes_[x].store(0);
    }
}

void WriteCensus::record(int worker, index_t i0, index_t j0, index_t rows, index_t cols) {
    for (index_t j = j0; j < j0 + cols; ++j) {
        for (index_t i = i0; i < i0 + rows; ++i) {
            const index_t x = j * rows_ + i;
            int expected = -1;
            if (!owner_[x].compare_exchange_strong(expected, worker) && expected != worker)
                conflict_.store(true);
            writes_[x].fetch_add(1);
        }
    }
}

bool WriteCensus::single_writer() const {
    if (conflict_.load()) return false;
    for (index_t x = 0; x < rows_ * cols_; ++x)
        if (owner_[x].load() < 0) return false;
    return true;
}

namespace detail {

GotoRun prepare_goto(ConstMatrixView a, ConstMatrixView b, MatrixView c, const GotoParams& params,
                     GotoStats* stats) {
    check_conformal(a, b, c);
    if (const auto violations = validate(params); !violations.empty()) {
        std::string msg = "invalid blocking parameters:";
        for (const auto& v : violations) msg += " " + v + ";";
        throw std::invalid_argument(msg);
    }
    return {a, b, c, params, default_registry().micro_kernel(params.micro_kernel), stats};
}

index_t a_workspace(const GotoRun& run) {
    const auto& p = run.params;
    return round_up(std::min(p.mc, run.c.rows()), p.mr) * std::min(p.kc, run.a.cols());
}

index_t b_workspace(const GotoRun& run) {
    const auto& p = run.params;
    return std::min(p.kc, run.a.cols()) * round_up(std::min(p.nc, run.c.cols()), p.nr);
}

void pack_a_block(const GotoRun& run, index_t ic, index_t pc, index_t mc_eff, index_t kc_eff,
                  PackedBlock& out) {
    pack_a_into(sub_view(run.a, ic, pc, mc_eff, kc_eff), run.params.mr, out);
    if (run.stats) run.stats->pack_a_calls.fetch_add(1, std::memory_order_relaxed);
}

void pack_b_block(const GotoRun& run, index_t pc, index_t jc, index_t kc_eff, index_t nc_eff,
                  PackedBlock& out) {
    pack_b_into(sub_view(run.b, pc, jc, kc_eff, nc_eff), run.params.nr, out);
    if (run.stats) run.stats->pack_b_calls.fetch_add(1, std::memory_order_relaxed);
}

void macro_kernel(const GotoRun& run, const PackedBlock& a_packed, const PackedBlock& b_packed,
                  index_t ic, index_t jc, index_t jr_begin, index_t jr_end, int worker) {
    const index_t mr = run.params.mr, nr = run.params.nr;
    const index_t mc_eff = a_packed.source_rows();
    const index_t nc_eff = b_packed.source_cols();
    const index_t kc_eff = a_packed.depth();

    for (index_t jq = jr_begin; jq < jr_end; ++jq) {
        const index_t jr = jq * nr;
        const index_t cols = std::min(nr, nc_eff - jr);
        const double* b_panel = b_packed.panel(jq);
        for (index_t iq = 0; iq < a_packed.panel_count(); ++iq) {
            const index_t ir = iq * mr;
            const index_t rows = std::min(mr, mc_eff - ir);
            MatrixView c_block(&run.c(ic + ir, jc + jr), rows, cols, run.c.ld());
            run.kernel(kc_eff, a_packed.panel(iq), b_panel, c_block, mr, nr);
            if (run.stats) {
                run.stats->kernel_calls.fetch_add(1, std::memory_order_relaxed);
                if (run.stats->census)
                    run.stats->census->record(worker, ic + ir, jc + jr, rows, cols);
            }
        }
    }
}

}  // namespace detail

void gemm_goto(ConstMatrixView a, ConstMatrixView b, MatrixView c, const GotoParams& params,
               GotoStats* stats) {
    const detail::GotoRun run = detail::prepare_goto(a, b, c, params, stats);
    const index_t m = c.rows(), n = c.cols(), k = a.cols();

    PackedBlock a_packed, b_packed;
    a_packed.reserve(detail::a_workspace(run));
    b_packed.reserve(detail::b_workspace(run));

    for (index_t jc = 0; jc < n; jc += params.nc) {
        const index_t nc_eff = std::min(params.nc, n - jc);
        for (index_t pc = 0; pc < k; pc += params.kc) {
            const index_t kc_eff = std::min(params.kc, k - pc);
            detail::pack_b_block(run, pc, jc, kc_eff, nc_eff, b_packed);
            for (index_t ic = 0; ic < m; ic += params.mc) {
                const index_t mc_eff = std::min(params.mc, m - ic);
                detail::pack_a_block(run, ic, pc, mc_eff, kc_eff, a_packed);
                detail::macro_kernel(run, a_packed, b_packed, ic, jc, 0,
                                     b_packed.panel_count(), 0);
            }
        }
    }
}

}  // namespace gemmforge
