// gemmforge: benchmark, verify and tune the GEMM engines.
//
//   gemmforge bench  [--config FILE] [--alg NAME,...] [--min N --max N --step N]
//                    [--threads T --parallel-loop ic|jr] [--check]
//                    [--format table|csv|matlab] [--label S] [--seed S]
//   gemmforge verify --alg NAME [--shapes m,n,k;...] [--seed S]
//   gemmforge tune   --grid-file FILE --probe N
//
// Exit status: 0 success, 1 verification failure, 2 bad input.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gemmforge/bench.hpp"
#include "gemmforge/config.hpp"
#include "gemmforge/registry.hpp"

namespace {

using namespace gemmforge;

struct CommonOptions {
    std::string config_file;
    std::vector<std::string> sets;
    KeyValues overrides;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--config", config_file, "key = value configuration file")->check(CLI::ExistingFile);
        cmd->add_option("--set", sets, "override any config key, KEY=VALUE (repeatable)");
    }

    Config load() {
        KeyValues cli;
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw ConfigError("--set expects KEY=VALUE, got '" + s + "'");
            cli.emplace_back(s.substr(0, eq), s.substr(eq + 1));
        }
        cli.insert(cli.end(), overrides.begin(), overrides.end());
        std::optional<std::filesystem::path> file;
        if (!config_file.empty()) file = config_file;
        return load_config(file, environment_overlay(), cli);
    }
};

// Adds an option whose value, when given, becomes a config override.
template <typename T>
void add_override(CLI::App* cmd, const std::string& flag, const std::string& key, CommonOptions& common,
                  const std::string& help) {
    cmd->add_option_function<T>(
        flag,
        [&common, key](const T& value) {
            std::ostringstream text;
            text << value;
            common.overrides.emplace_back(key, text.str());
        },
        help);
}

std::string default_label(const Config& config) {
    return "run_" + config.bench.algorithms.front() + (config.threads > 1 ? "_mt" : "_st");
}

int run_bench(CommonOptions& common, const std::string& label, bool check) {
    if (check) common.overrides.emplace_back("check", "true");
    const Config config = common.load();
    const auto records = run_sweep(config);
    std::cout << emit(records, config.format, label.empty() ? default_label(config) : label);
    return 0;
}

int run_verify(CommonOptions& common, const std::string& algorithm, const std::string& shapes_text) {
    const Config config = common.load();
    const auto shapes = parse_shapes(shapes_text);
    const VerifyReport report = verify(algorithm, shapes, config.bench.seed, engine_options(config));
    for (const auto& e : report.entries) {
        std::printf("%zu  %zu  %zu  max_abs_diff=%.3e  tol=%.3e  %s\n", e.shape.m, e.shape.n, e.shape.k,
                    e.diff.max_abs_diff, e.tolerance, e.passed ? "PASS" : "FAIL");
        if (!e.passed) std::fprintf(stderr, "%s\n", format_diagnostic(e.diff).c_str());
    }
    return report.passed() ? 0 : 1;
}

int run_tune(CommonOptions& common, const std::string& grid_file, index_t probe) {
    const Config config = common.load();
    std::ifstream in(grid_file);
    if (!in) throw ConfigError("cannot read grid file '" + grid_file + "'");
    std::ostringstream text;
    text << in.rdbuf();
    const TuneGrid grid = parse_grid_text(text.str(), config.goto_params);
    const TuneResult result = tune(config, grid, probe);

    for (const auto& s : result.skipped) std::fprintf(stderr, "warning: skipped %s\n", s.c_str());
    std::printf("%4s  %4s  %6s  %6s  %6s  %8s\n", "mr", "nr", "mc", "kc", "nc", "gflops");
    for (const auto& t : result.table) {
        const auto& p = t.params;
        std::printf("%4zu  %4zu  %6zu  %6zu  %6zu  %8.2f\n", p.mr, p.nr, p.mc, p.kc, p.nc, t.gflops);
    }
    const auto& b = result.best;
    std::printf("\n# best at probe %zu\nmr = %zu\nnr = %zu\nmc = %zu\nkc = %zu\nnc = %zu\n",
                result.probe_size, b.mr, b.nr, b.mc, b.kc, b.nc);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gemmforge: layered double-precision GEMM engines"};
    app.require_subcommand(1);

    CommonOptions bench_opts, verify_opts, tune_opts;
    std::string label;
    bool check = false;

    auto* bench = app.add_subcommand("bench", "sweep problem sizes and report GFLOPS");
    bench_opts.add_to(bench);
    add_override<std::string>(bench, "--alg", "algorithms", bench_opts, "algorithms, comma separated");
    add_override<std::size_t>(bench, "--min", "size_min", bench_opts, "smallest m = n = k");
    add_override<std::size_t>(bench, "--max", "size_max", bench_opts, "largest m = n = k");
    add_override<std::size_t>(bench, "--step", "size_step", bench_opts, "size increment");
    add_override<std::size_t>(bench, "--threads", "threads", bench_opts, "worker threads");
    add_override<std::string>(bench, "--parallel-loop", "parallel_loop", bench_opts, "ic or jr");
    add_override<std::string>(bench, "--format", "format", bench_opts, "table, csv or matlab");
    add_override<std::uint64_t>(bench, "--seed", "seed", bench_opts, "operand seed");
    bench->add_flag("--check", check, "verify every result against the triple loop");
    bench->add_option("--label", label, "MATLAB block name");

    std::string verify_alg;
    std::string shapes = "1,1,1;7,5,3;31,33,32;97,89,83";
    auto* verify_cmd = app.add_subcommand("verify", "compare an algorithm with the triple loop");
    verify_opts.add_to(verify_cmd);
    verify_cmd->add_option("--alg", verify_alg, "algorithm name")->required();
    verify_cmd->add_option("--shapes", shapes, "m,n,k;m,n,k;...")->capture_default_str();
    add_override<std::uint64_t>(verify_cmd, "--seed", "seed", verify_opts, "operand seed");
    add_override<std::size_t>(verify_cmd, "--threads", "threads", verify_opts, "worker threads");
    add_override<std::string>(verify_cmd, "--parallel-loop", "parallel_loop", verify_opts, "ic or jr");

    std::string grid_file;
    std::size_t probe = 0;
    auto* tune_cmd = app.add_subcommand("tune", "search blocking parameters for gemm_goto");
    tune_opts.add_to(tune_cmd);
    tune_cmd->add_option("--grid-file", grid_file, "grid of candidate mr, nr, mc, kc, nc")->required()->check(CLI::ExistingFile);
    tune_cmd->add_option("--probe", probe, "m = n = k used for probing")->required()->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (bench->parsed()) return run_bench(bench_opts, label, check);
        if (verify_cmd->parsed()) return run_verify(verify_opts, verify_alg, shapes);
        if (tune_cmd->parsed()) return run_tune(tune_opts, grid_file, probe);
    } catch (const VerificationError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
