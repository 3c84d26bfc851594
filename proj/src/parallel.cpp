#include "gemmforge/parallel.hpp"

#include <algorithm>
#include <barrier>
#include <thread>

#include "goto_detail.hpp"

namespace gemmforge {

std::string_view to_string(LoopChoice loop) noexcept {
    return loop == LoopChoice::ic ? "ic" : "jr";
}

LoopChoice parse_loop_choice(std::string_view text) {
    if (text == "ic") return LoopChoice::ic;
    if (text == "jr") return LoopChoice::jr;
    throw std::invalid_argument("parallel loop must be ic or jr, got '" + std::string(text) + "'");
}

ParallelPlan make_plan(LoopChoice loop, index_t threads, index_t extent, index_t step) {
    if (threads == 0) throw std::invalid_argument("make_plan: thread count must be >= 1");
    if (extent == 0 || step == 0) throw std::invalid_argument("make_plan: extent and step must be >= 1");
    const index_t q = (extent + step - 1) / step;
    ParallelPlan plan{loop, threads, {}};
    plan.partition.reserve(threads);
    index_t begin = 0;
    for (index_t w = 0; w < threads; ++w) {
        const index_t len = q / threads + (w < q % threads ? 1 : 0);
        plan.partition.push_back({begin, begin + len});
        begin += len;
    }
    return plan;
}

namespace {

// Runs fn(worker) on `threads` workers, the caller acting as worker 0.
// Workers meet at barriers, so fn must not throw.
template <typename Fn>
void run_team(index_t threads, Fn&& fn) {
    std::vector<std::jthread> team;
    team.reserve(threads - 1);
    for (index_t w = 1; w < threads; ++w) team.emplace_back(fn, static_cast<int>(w));
    fn(0);
}

void run_ic_parallel(const detail::GotoRun& run, index_t threads) {
    const auto& params = run.params;
    const index_t m = run.c.rows(), n = run.c.cols(), k = run.a.cols();
    const ParallelPlan plan = make_plan(LoopChoice::ic, threads, m, params.mc);

    PackedBlock b_packed;
    b_packed.reserve(detail::b_workspace(run));
    std::barrier sync(static_cast<std::ptrdiff_t>(threads));

    run_team(threads, [&](int w) {
        PackedBlock a_packed;  // private to this worker
        a_packed.reserve(detail::a_workspace(run));
        const IterRange mine = plan.partition[static_cast<index_t>(w)];
        for (index_t jc = 0; jc < n; jc += params.nc) {
            const index_t nc_eff = std::min(params.nc, n - jc);
            for (index_t pc = 0; pc < k; pc += params.kc) {
                const index_t kc_eff = std::min(params.kc, k - pc);
                if (w == 0) detail::pack_b_block(run, pc, jc, kc_eff, nc_eff, b_packed);
                sync.arrive_and_wait();
                for (index_t it = mine.begin; it < mine.end; ++it) {
                    const index_t ic = it * params.mc;
                    const index_t mc_eff = std::min(params.mc, m - ic);
                    detail::pack_a_block(run, ic, pc, mc_eff, kc_eff, a_packed);
                    detail::macro_kernel(run, a_packed, b_packed, ic, jc, 0,
                                         b_packed.panel_count(), w);
                }
                // b_packed is overwritten next iteration
                sync.arrive_and_wait();
            }
        }
    });
}

void run_jr_parallel(const detail::GotoRun& run, index_t threads) {
    const auto& params = run.params;
    const index_t m = run.c.rows(), n = run.c.cols(), k = run.a.cols();

    PackedBlock a_packed, b_packed;
    a_packed.reserve(detail::a_workspace(run));
    b_packed.reserve(detail::b_workspace(run));
    std::barrier sync(static_cast<std::ptrdiff_t>(threads));

    run_team(threads, [&](int w) {
        for (index_t jc = 0; jc < n; jc += params.nc) {
            const index_t nc_eff = std::min(params.nc, n - jc);
            const IterRange mine =
                make_plan(LoopChoice::jr, threads, nc_eff, params.nr).partition[static_cast<index_t>(w)];
            for (index_t pc = 0; pc < k; pc += params.kc) {
                const index_t kc_eff = std::min(params.kc, k - pc);
                if (w == 0) detail::pack_b_block(run, pc, jc, kc_eff, nc_eff, b_packed);
                for (index_t ic = 0; ic < m; ic += params.mc) {
                    const index_t mc_eff = std::min(params.mc, m - ic);
                    if (w == 0) detail::pack_a_block(run, ic, pc, mc_eff, kc_eff, a_packed);
                    sync.arrive_and_wait();
                    detail::macro_kernel(run, a_packed, b_packed, ic, jc, mine.begin, mine.end, w);
                    // both buffers may be repacked next iteration
                    sync.arrive_and_wait();
                }
            }
        }
    });
}

}  // namespace

void gemm_goto_parallel(ConstMatrixView a, ConstMatrixView b, MatrixView c,
                        const GotoParams& params, LoopChoice loop, index_t threads,
                        GotoStats* stats) {
    if (threads == 0 || threads > kMaxThreads) {
        throw std::invalid_argument("thread count " + std::to_string(threads) + " outside 1.." +
                                    std::to_string(kMaxThreads));
    }
    const detail::GotoRun run = detail::prepare_goto(a, b, c, params, stats);
    if (loop == LoopChoice::ic)
        run_ic_parallel(run, threads);
    else
        run_jr_parallel(run, threads);
}

}  // namespace gemmforge
