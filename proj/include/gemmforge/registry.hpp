#pragma once

// Run-time selection of micro-kernels and whole-GEMM algorithms by name.

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gemmforge/blocking.hpp"
#include "gemmforge/goto.hpp"
#include "gemmforge/kernels.hpp"
#include "gemmforge/parallel.hpp"

namespace gemmforge {

/// Everything a whole-GEMM variant may consult besides its operands. The
/// blocked variants use (mc, nc, kc) as their (bm, bn, bk) block sizes and
/// register_tiled uses (mr, nr).
struct EngineOptions {
    GotoParams goto_params;
    LoopChoice loop = LoopChoice::ic;
    index_t threads = 1;
};

using GemmFn = std::function<void(ConstMatrixView, ConstMatrixView, MatrixView, const EngineOptions&)>;

struct GemmVariant {
    GemmFn run;
    std::string description;
};

struct MicroKernelEntry {
    MicroKernelFn run;
    std::string description;
};

class KernelRegistry {
public:
    KernelRegistry() = default;
    /// Registry holding the built-in kernels and variants.
    static KernelRegistry with_builtins();

    /// Throws std::invalid_argument if the name is already taken.
    void add_micro_kernel(std::string name, MicroKernelFn fn, std::string description);
    void add_variant(std::string name, GemmFn fn, std::string description);

    bool has_micro_kernel(std::string_view name) const;
    bool has_variant(std::string_view name) const;

    /// Lookups throw std::invalid_argument for unknown names.
    MicroKernelFn micro_kernel(std::string_view name) const;
    const GemmVariant& variant(std::string_view name) const;
    /// A variant bound to default options, for use as a gemm_blocked inner engine.
    BlockEngine block_engine(std::string_view name) const;

    std::vector<std::string> micro_kernel_names() const;
    std::vector<std::string> variant_names() const;

private:
    std::map<std::string, MicroKernelEntry, std::less<>> micro_kernels_;
    std::map<std::string, GemmVariant, std::less<>> variants_;
};

const KernelRegistry& default_registry();

}  // namespace gemmforge
