#pragma once

// Benchmark driver: size sweeps, oracle verification, report formatting and
// the blocking-parameter tuner.

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gemmforge/config.hpp"
#include "gemmforge/matrix.hpp"
#include "gemmforge/registry.hpp"

namespace gemmforge {

/// One sweep point. Column 4 of the table output is ref_gflops (the triple
/// loop), column 5 is alg_gflops.
struct BenchRecord {
    index_t m = 0, n = 0, k = 0;
    double ref_gflops = 0.0;
    double alg_gflops = 0.0;
    /// Present only when verification ran.
    std::optional<double> max_abs_diff;
    std::string algorithm;
    index_t threads = 1;
    double ref_seconds = 0.0;
    double alg_seconds = 0.0;
};

/// `C[ i ][ j ] != C_ref, <got %E>, <want %E>` for the first bad element.
std::string format_diagnostic(const DiffReport& report);

/// Thrown when an engine disagrees with the oracle beyond tol(k). what() is
/// the format_diagnostic line.
class VerificationError : public std::runtime_error {
public:
    VerificationError(std::string algorithm, Shape shape, DiffReport report);
    const std::string& algorithm() const noexcept { return algorithm_; }
    const Shape& shape() const noexcept { return shape_; }
    const DiffReport& report() const noexcept { return report_; }

private:
    std::string algorithm_;
    Shape shape_;
    DiffReport report_;
};

/// Engine options carried by a Config.
EngineOptions engine_options(const Config& config);

/// Seeded operands for one problem: A from seed, B from seed + 1, C from seed + 2.
struct Problem {
    Matrix a, b, c;
    static Problem make(Shape shape, std::uint64_t seed);
};

/// Minimum wall time over `reps` timed runs after one untimed warm-up. `reset`
/// runs before every run and is not timed.
double time_best_of(int reps, const std::function<void()>& reset, const std::function<void()>& run);

/// The shapes a Config sweeps: its explicit list, or square sizes
/// size_min, size_min + size_step, ... <= size_max.
std::vector<Shape> sweep_shapes(const Config& config);

/// Times every selected algorithm at every sweep shape against the triple
/// loop. With check enabled each result is compared to the oracle and the
/// first failure throws VerificationError.
std::vector<BenchRecord> run_sweep(const Config& config,
                                   const KernelRegistry& registry = default_registry());

struct VerifyEntry {
    Shape shape;
    DiffReport diff;
    double tolerance;
    bool passed;
};

struct VerifyReport {
    std::string algorithm;
    std::vector<VerifyEntry> entries;
    bool passed() const;
};

/// Runs `algorithm` and the triple loop on identical seeded inputs for each
/// shape. Throws std::invalid_argument for an unregistered algorithm.
VerifyReport verify(std::string_view algorithm, const std::vector<Shape>& shapes,
                    std::uint64_t seed, const EngineOptions& options = {},
                    const KernelRegistry& registry = default_registry());

/// Renders records. Throws std::invalid_argument when `records` is empty.
std::string emit(const std::vector<BenchRecord>& records, OutputFormat format,
                 std::string_view label);

/// Table row: `m  n  k  ref  alg`, integers width 4 and GFLOPS with two
/// decimals, fields separated by at least two spaces.
std::string format_table_row(const BenchRecord& record);

struct TuneGrid {
    std::vector<index_t> mr, nr, mc, kc, nc;
};

/// Grid file: `key = v1,v2,...` lines for any of mr, nr, mc, kc, nc.
/// Missing keys fall back to the single value in `defaults`.
TuneGrid parse_grid_text(std::string_view text, const GotoParams& defaults);

struct TunePoint {
    GotoParams params;
    double gflops;
    double seconds;
    double max_abs_diff;
};

struct TuneResult {
    GotoParams best;
    std::vector<TunePoint> table;
    index_t probe_size = 0;
    /// Grid points left out, each with the reason.
    std::vector<std::string> skipped;
};

/// Benchmarks gemm_goto at m = n = k = probe_size for every grid point that
/// validates and whose mc, kc and nc do not exceed probe_size. Returns the
/// fastest; ties go to the smaller mc*kc + kc*nc workspace. Each probed
/// point is verified against the oracle once. Throws std::invalid_argument
/// if no point survives filtering.
TuneResult tune(const Config& config, const TuneGrid& grid, index_t probe_size);

}  // namespace gemmforge
