#include "gemmforge/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <limits>
#include <sstream>

#include "gemmforge/goto.hpp"
#include "gemmforge/kernels.hpp"

namespace gemmforge {

namespace {

void copy_into(const Matrix& from, Matrix& to) {
    std::copy(from.storage().begin(), from.storage().end(), to.storage().begin());
}

std::string printf_string(const char* fmt, auto... args) {
    const int len = std::snprintf(nullptr, 0, fmt, args...);
    std::string out(static_cast<std::size_t>(len), '\0');
    std::snprintf(out.data(), out.size() + 1, fmt, args...);
    return out;
}

index_t workspace(const GotoParams& p) { return p.mc * p.kc + p.kc * p.nc; }

}  // namespace

std::string format_diagnostic(const DiffReport& report) {
    return printf_string("C[ %zu ][ %zu ] != C_ref, %E, %E", report.first_bad_i.value_or(0),
                         report.first_bad_j.value_or(0), report.value_got, report.value_expected);
}

VerificationError::VerificationError(std::string algorithm, Shape shape, DiffReport report)
    : std::runtime_error(format_diagnostic(report)),
      algorithm_(std::move(algorithm)),
      shape_(shape),
      report_(report) {}

EngineOptions engine_options(const Config& config) {
    return {config.goto_params, config.parallel_loop, config.threads};
}

Problem Problem::make(Shape s, std::uint64_t seed) {
    Problem p{Matrix(s.m, s.k), Matrix(s.k, s.n), Matrix(s.m, s.n)};
    fill_random(p.a, seed);
    fill_random(p.b, seed + 1);
    fill_random(p.c, seed + 2);
    return p;
}

double time_best_of(int reps, const std::function<void()>& reset, const std::function<void()>& run) {
    using clock = std::chrono::steady_clock;
    reset();
    run();  // warm-up
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < reps; ++r) {
        reset();
        const auto start = clock::now();
        run();
        const std::chrono::duration<double> elapsed = clock::now() - start;
        best = std::min(best, elapsed.count());
    }
    // a clock tick coarser than the run would report zero
    return std::max(best, std::numeric_limits<double>::min());
}

std::vector<Shape> sweep_shapes(const Config& config) {
    const auto& b = config.bench;
    if (!b.shapes.empty()) return b.shapes;
    std::vector<Shape> shapes;
    for (index_t s = b.size_min; s <= b.size_max; s += b.size_step) shapes.push_back({s, s, s});
    return shapes;
}

std::vector<BenchRecord> run_sweep(const Config& config, const KernelRegistry& registry) {
    if (const auto violations = validate(config, registry); !violations.empty()) {
        throw ConfigError("invalid configuration", violations);
    }
    const EngineOptions options = engine_options(config);
    const GemmFn& reference = registry.variant("naive").run;
    std::vector<BenchRecord> records;

    for (const Shape shape : sweep_shapes(config)) {
        Problem prob = Problem::make(shape, config.bench.seed);
        Matrix work(shape.m, shape.n);
        auto reset = [&] { copy_into(prob.c, work); };

        const double ref_seconds =
            time_best_of(3, reset, [&] { reference(prob.a, prob.b, work, options); });
        Matrix expected = work;  // last run started from prob.c
        const double tol = tolerance(prob.a, prob.b);

        for (const auto& name : config.bench.algorithms) {
            const GemmFn& engine = registry.variant(name).run;
            const double seconds = time_best_of(3, reset, [&] { engine(prob.a, prob.b, work, options); });

            BenchRecord rec;
            rec.m = shape.m;
            rec.n = shape.n;
            rec.k = shape.k;
            rec.ref_seconds = ref_seconds;
            rec.alg_seconds = seconds;
            rec.ref_gflops = gflops(shape.m, shape.n, shape.k, ref_seconds);
            rec.alg_gflops = gflops(shape.m, shape.n, shape.k, seconds);
            rec.algorithm = name;
            rec.threads = config.threads;
            if (config.bench.check) {
                const DiffReport diff = max_abs_diff(work, expected, tol);
                if (!diff.ok()) throw VerificationError(name, shape, diff);
                rec.max_abs_diff = diff.max_abs_diff;
            }
            records.push_back(std::move(rec));
        }
    }
    return records;
}

bool VerifyReport::passed() const {
    return std::all_of(entries.begin(), entries.end(), [](const VerifyEntry& e) { return e.passed; });
}

VerifyReport verify(std::string_view algorithm, const std::vector<Shape>& shapes,
                    std::uint64_t seed, const EngineOptions& options,
                    const KernelRegistry& registry) {
    const GemmFn& engine = registry.variant(algorithm).run;
    VerifyReport report{std::string(algorithm), {}};
    for (const Shape shape : shapes) {
        Problem prob = Problem::make(shape, seed);
        Matrix expected = prob.c;
        gemm_naive(prob.a, prob.b, expected);
        engine(prob.a, prob.b, prob.c, options);
        const double tol = tolerance(prob.a, prob.b);
        const DiffReport diff = max_abs_diff(prob.c, expected, tol);
        report.entries.push_back({shape, diff, tol, diff.ok()});
    }
    return report;
}

std::string format_table_row(const BenchRecord& r) {
    return printf_string("%zu  %4zu  %4zu  %4.2f  %4.2f", r.m, r.n, r.k, r.ref_gflops, r.alg_gflops);
}

std::string emit(const std::vector<BenchRecord>& records, OutputFormat format,
                 std::string_view label) {
    if (records.empty()) throw std::invalid_argument("emit: no records");
    std::string out;
    switch (format) {
        case OutputFormat::table:
            for (const auto& r : records) out += format_table_row(r) + "\n";
            break;
        case OutputFormat::matlab:
            out += std::string(label) + "=[\n";
            for (const auto& r : records) out += format_table_row(r) + "\n";
            out += "];\n";
            break;
        case OutputFormat::csv:
            out += "m,n,k,ref_gflops,alg_gflops,max_abs_diff,algorithm,threads\n";
            for (const auto& r : records) {
                out += printf_string("%zu,%zu,%zu,%.4f,%.4f,", r.m, r.n, r.k, r.ref_gflops,
                                     r.alg_gflops);
                if (r.max_abs_diff) out += printf_string("%.6e", *r.max_abs_diff);
                out += "," + r.algorithm + printf_string(",%zu\n", r.threads);
            }
            break;
    }
    return out;
}

TuneGrid parse_grid_text(std::string_view text, const GotoParams& defaults) {
    TuneGrid grid{{defaults.mr}, {defaults.nr}, {defaults.mc}, {defaults.kc}, {defaults.nc}};
    for (const auto& entry : parse_config_text(text, "<grid>")) {
        std::vector<index_t>* target = nullptr;
        if (entry.key == "mr") target = &grid.mr;
        else if (entry.key == "nr") target = &grid.nr;
        else if (entry.key == "mc") target = &grid.mc;
        else if (entry.key == "kc") target = &grid.kc;
        else if (entry.key == "nc") target = &grid.nc;
        else throw ConfigError("<grid>:" + std::to_string(entry.line) + ": unknown key '" + entry.key + "'");

        target->clear();
        std::istringstream values(entry.value);
        for (std::string item; std::getline(values, item, ',');) {
            item.erase(0, item.find_first_not_of(" \t"));
            item.erase(item.find_last_not_of(" \t") + 1);
            if (item.empty()) continue;
            index_t v = 0;
            const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
            if (ec != std::errc() || ptr != item.data() + item.size()) {
                throw ConfigError("<grid>:" + std::to_string(entry.line) + ": '" + item +
                                  "' is not a non-negative integer");
            }
            target->push_back(v);
        }
        if (target->empty()) {
            throw ConfigError("<grid>:" + std::to_string(entry.line) + ": no values for '" + entry.key + "'");
        }
    }
    return grid;
}

TuneResult tune(const Config& config, const TuneGrid& grid, index_t probe_size) {
    if (probe_size == 0) throw std::invalid_argument("tune: probe size must be >= 1");
    TuneResult result;
    result.probe_size = probe_size;

    std::vector<GotoParams> candidates;
    for (const index_t mr : grid.mr)
        for (const index_t nr : grid.nr)
            for (const index_t mc : grid.mc)
                for (const index_t kc : grid.kc)
                    for (const index_t nc : grid.nc) {
                        GotoParams p{mc, nc, kc, mr, nr, config.goto_params.micro_kernel};
                        const std::string tag = "mr=" + std::to_string(mr) + " nr=" + std::to_string(nr) +
                                                " mc=" + std::to_string(mc) + " kc=" + std::to_string(kc) +
                                                " nc=" + std::to_string(nc);
                        if (auto v = validate(p); !v.empty()) {
                            result.skipped.push_back(tag + ": " + v.front());
                        } else if (mc > probe_size || kc > probe_size || nc > probe_size) {
                            result.skipped.push_back(tag + ": block size exceeds probe size " +
                                                     std::to_string(probe_size));
                        } else {
                            candidates.push_back(std::move(p));
                        }
                    }
    if (candidates.empty()) throw std::invalid_argument("tune: no valid grid points");

    const Shape shape{probe_size, probe_size, probe_size};
    Problem prob = Problem::make(shape, config.bench.seed);
    Matrix expected = prob.c;
    gemm_naive(prob.a, prob.b, expected);
    const double tol = tolerance(prob.a, prob.b);

    const GemmFn& engine = default_registry().variant("goto").run;
    Matrix work(shape.m, shape.n);
    double best_gflops = -1.0;
    for (const auto& params : candidates) {
        EngineOptions options = engine_options(config);
        options.goto_params = params;
        const double seconds = time_best_of(3, [&] { copy_into(prob.c, work); },
                                            [&] { engine(prob.a, prob.b, work, options); });
        const DiffReport diff = max_abs_diff(work, expected, tol);
        if (!diff.ok()) throw VerificationError("goto", shape, diff);

        const double rate = gflops(shape.m, shape.n, shape.k, seconds);
        result.table.push_back({params, rate, seconds, diff.max_abs_diff});
        if (rate > best_gflops ||
            (rate == best_gflops && workspace(params) < workspace(result.best))) {
            result.best = params;
            best_gflops = rate;
        }
    }
    return result;
}

}  // namespace gemmforge
