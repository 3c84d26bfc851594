#include "gemmforge/registry.hpp"

#include <stdexcept>

namespace gemmforge {

namespace {

std::string joined(const std::vector<std::string>& names) {
    std::string out;
    for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
    return out;
}

}  // namespace

KernelRegistry KernelRegistry::with_builtins() {
    KernelRegistry reg;
    reg.add_micro_kernel("reference", &gemmforge::micro_kernel, "MicroTile driven by rank-1 updates, any mr x nr");
    reg.add_micro_kernel("unrolled", &micro_kernel_unrolled,
                         "compile-time mr x nr instance of the reference arithmetic");

    reg.add_variant(
        "naive", [](ConstMatrixView a, ConstMatrixView b, MatrixView c, const EngineOptions&) { gemm_naive(a, b, c); },
        "triple loop i, j, p");
    reg.add_variant(
        "colwise", [](ConstMatrixView a, ConstMatrixView b, MatrixView c, const EngineOptions&) { gemm_colwise(a, b, c); },
        "triple loop j, p, i down columns");
    reg.add_variant(
        "register_tiled",
        [](ConstMatrixView a, ConstMatrixView b, MatrixView c, const EngineOptions& o) {
            gemm_register_tiled(a, b, c, o.goto_params.mr, o.goto_params.nr);
        },
        "mr x nr tiles of C kept in local accumulators");
    reg.add_variant(
        "blocked",
        [](ConstMatrixView a, ConstMatrixView b, MatrixView c, const EngineOptions& o) {
            const auto& p = o.goto_params;
            gemm_blocked(a, b, c, p.mc, p.nc, p.kc, [](ConstMatrixView x, ConstMatrixView y, MatrixView z) {
                gemm_naive(x, y, z);
            });
        },
        "mc x nc x kc cache blocks, triple loop inside");
    reg.add_variant(
        "blocked_tiled",
        [](ConstMatrixView a, ConstMatrixView b, MatrixView c, const EngineOptions& o) {
            const auto& p = o.goto_params;
            gemm_blocked(a, b, c, p.mc, p.nc, p.kc, [&p](ConstMatrixView x, ConstMatrixView y, MatrixView z) {
                gemm_register_tiled(x, y, z, p.mr, p.nr);
            });
        },
        "mc x nc x kc cache blocks, register-tiled inside");
    reg.add_variant(
        "goto",
        [](ConstMatrixView a, ConstMatrixView b, MatrixView c, const EngineOptions& o) {
            if (o.threads > 1)
                gemm_goto_parallel(a, b, c, o.goto_params, o.loop, o.threads);
            else
                gemm_goto(a, b, c, o.goto_params);
        },
        "five-loop packed algorithm; threaded when threads > 1");
    return reg;
}

void KernelRegistry::add_micro_kernel(std::string name, MicroKernelFn fn, std::string description) {
    if (micro_kernels_.contains(name)) throw std::invalid_argument("duplicate micro-kernel '" + name + "'");
    micro_kernels_.emplace(std::move(name), MicroKernelEntry{fn, std::move(description)});
}

void KernelRegistry::add_variant(std::string name, GemmFn fn, std::string description) {
    if (variants_.contains(name)) throw std::invalid_argument("duplicate algorithm '" + name + "'");
    variants_.emplace(std::move(name), GemmVariant{std::move(fn), std::move(description)});
}

bool KernelRegistry::has_micro_kernel(std::string_view name) const {
    return micro_kernels_.find(name) != micro_kernels_.end();
}

bool KernelRegistry::has_variant(std::string_view name) const {
    return variants_.find(name) != variants_.end();
}

MicroKernelFn KernelRegistry::micro_kernel(std::string_view name) const {
    const auto it = micro_kernels_.find(name);
    if (it == micro_kernels_.end()) {
        throw std::invalid_argument("unknown micro-kernel '" + std::string(name) + "' (known: " +
                                    joined(micro_kernel_names()) + ")");
    }
    return it->second.run;
}

const GemmVariant& KernelRegistry::variant(std::string_view name) const {
    const auto it = variants_.find(name);
    if (it == variants_.end()) {
        throw std::invalid_argument("unknown algorithm '" + std::string(name) + "' (known: " +
                                    joined(variant_names()) + ")");
    }
    return it->second;
}

BlockEngine KernelRegistry::block_engine(std::string_view name) const {
    GemmFn fn = variant(name).run;
    return [fn = std::move(fn)](ConstMatrixView a, ConstMatrixView b, MatrixView c) {
        fn(a, b, c, EngineOptions{});
    };
}

std::vector<std::string> KernelRegistry::micro_kernel_names() const {
    std::vector<std::string> out;
    for (const auto& [name, entry] : micro_kernels_) out.push_back(name);
    return out;
}

std::vector<std::string> KernelRegistry::variant_names() const {
    std::vector<std::string> out;
    for (const auto& [name, entry] : variants_) out.push_back(name);
    return out;
}

const KernelRegistry& default_registry() {
    static const KernelRegistry reg = KernelRegistry::with_builtins();
    return reg;
}

}  // namespace gemmforge
