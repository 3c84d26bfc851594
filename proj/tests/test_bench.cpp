#include <doctest.h>

#include <fstream>
#include <sstream>

#include "gemmforge/bench.hpp"

using namespace gemmforge;

namespace {

std::string golden(const std::string& name) {
    std::ifstream in(std::string(GEMMFORGE_GOLDEN_DIR) + "/" + name, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

BenchRecord record(index_t s, double ref, double alg) {
    BenchRecord r;
    r.m = r.n = r.k = s;
    r.ref_gflops = ref;
    r.alg_gflops = alg;
    r.algorithm = "goto";
    return r;
}

Config small_sweep() {
    Config c;
    c.bench.size_min = 16;
    c.bench.size_max = 48;
    c.bench.size_step = 16;
    c.bench.check = true;
    return c;
}

}  // namespace

TEST_CASE("emit formats") {
    SUBCASE("table row") {
        CHECK(emit({record(16, 0.82, 2.15)}, OutputFormat::table, "x") == golden("table_single.txt"));
    }
    SUBCASE("matlab block") {
        const std::vector<BenchRecord> rs{record(16, 0.82, 2.15), record(32, 0.74, 5.50), record(48, 0.85, 5.66)};
        CHECK(emit(rs, OutputFormat::matlab, "run_step1_st") == golden("matlab_step1.txt"));
    }
    SUBCASE("csv") {
        BenchRecord second;
        second.m = 1024;
        second.n = 512;
        second.k = 256;
        second.ref_gflops = 0.43;
        second.alg_gflops = 11.08;
        second.max_abs_diff = 0.0;
        second.algorithm = "goto";
        second.threads = 4;
        const std::string out = emit({record(16, 0.82, 2.15), second}, OutputFormat::csv, "x");
        CHECK(out == golden("csv_two.txt"));
        CHECK(std::count(out.begin(), out.end(), '\n') == 3);
    }
    SUBCASE("wide values keep two spaces") {
        BenchRecord r = record(1024, 12.5, 123.456);
        CHECK(format_table_row(r) == "1024  1024  1024  12.50  123.46");
    }
    SUBCASE("empty") {
        CHECK_THROWS_AS(emit({}, OutputFormat::table, "x"), std::invalid_argument);
    }
}

TEST_CASE("diagnostic shape") {
    DiffReport r;
    r.max_abs_diff = 1.0;
    r.first_bad_i = 0;
    r.first_bad_j = 0;
    r.value_got = 1.253;
    r.value_expected = 2.253;
    CHECK(format_diagnostic(r) == "C[ 0 ][ 0 ] != C_ref, 1.253000E+00, 2.253000E+00");
    r.first_bad_i = 12;
    r.first_bad_j = 3;
    r.value_got = -4.5e-7;
    CHECK(format_diagnostic(r) == "C[ 12 ][ 3 ] != C_ref, -4.500000E-07, 2.253000E+00");
}

TEST_CASE("run_sweep") {
    SUBCASE("16..48 step 16 gives three square records") {
        const auto records = run_sweep(small_sweep());
        REQUIRE(records.size() == 3);
        for (index_t x = 0; x < 3; ++x) {
            CHECK(records[x].m == 16 * (x + 1));
            CHECK(records[x].n == records[x].m);
            CHECK(records[x].k == records[x].m);
            CHECK(records[x].algorithm == "goto");
            REQUIRE(records[x].max_abs_diff.has_value());
            CHECK(*records[x].max_abs_diff <= tolerance(records[x].k, 1.0, 1.0));
            CHECK(records[x].alg_gflops > 0.0);
            // GFLOPS fields are recomputable from the recorded times
            CHECK(records[x].alg_gflops == gflops(records[x].m, records[x].n, records[x].k, records[x].alg_seconds));
            CHECK(records[x].ref_gflops == gflops(records[x].m, records[x].n, records[x].k, records[x].ref_seconds));
        }
    }
    SUBCASE("no diff without check") {
        Config c = small_sweep();
        c.bench.check = false;
        for (const auto& r : run_sweep(c)) CHECK_FALSE(r.max_abs_diff.has_value());
    }
    SUBCASE("same config twice gives the same diffs") {
        Config c = small_sweep();
        c.bench.algorithms = {"goto", "blocked_tiled", "colwise"};
        const auto first = run_sweep(c), second = run_sweep(c);
        REQUIRE(first.size() == second.size());
        for (index_t x = 0; x < first.size(); ++x) CHECK(first[x].max_abs_diff == second[x].max_abs_diff);
    }
    SUBCASE("explicit shapes") {
        Config c = small_sweep();
        c.bench.shapes = {{5, 7, 3}, {31, 2, 9}};
        c.bench.algorithms = {"register_tiled", "goto"};
        const auto records = run_sweep(c);
        REQUIRE(records.size() == 4);
        CHECK(records[3].m == 31);
        CHECK(records[3].n == 2);
        CHECK(records[3].k == 9);
    }
    SUBCASE("corrupted engine aborts with the diagnostic") {
        KernelRegistry reg = KernelRegistry::with_builtins();
        reg.add_variant(
            "broken",
            [](ConstMatrixView a, ConstMatrixView b, MatrixView c, const EngineOptions&) {
                gemm_naive(a, b, c);
                c(2, 1) += 1.0;
            },
            "off by one at (2,1)");
        Config c = small_sweep();
        c.bench.algorithms = {"broken"};
        try {
            run_sweep(c, reg);
            FAIL("expected VerificationError");
        } catch (const VerificationError& e) {
            const std::string what = e.what();
            CHECK(what.rfind("C[ 2 ][ 1 ] != C_ref, ", 0) == 0);
            CHECK(e.algorithm() == "broken");
            CHECK(e.shape() == Shape{16, 16, 16});
        }
    }
    SUBCASE("invalid config") {
        Config c = small_sweep();
        c.bench.algorithms = {"nope"};
        CHECK_THROWS_AS(run_sweep(c), ConfigError);
    }
}

TEST_CASE("verify") {
    SUBCASE("1x1x1 goto") {
        const auto r = verify("goto", {{1, 1, 1}}, 3);
        CHECK(r.passed());
        CHECK(r.entries[0].diff.max_abs_diff == 0.0);
    }
    SUBCASE("colwise is exact") {
        const auto r = verify("colwise", {{3, 9, 4}, {17, 1, 23}, {8, 8, 8}}, 4);
        for (const auto& e : r.entries) CHECK(e.diff.max_abs_diff == 0.0);
    }
    SUBCASE("97x89x83 goto within tol") {
        const auto r = verify("goto", {{97, 89, 83}}, 7);
        REQUIRE(r.entries.size() == 1);
        CHECK(r.entries[0].diff.max_abs_diff <= r.entries[0].tolerance);
        CHECK(r.entries[0].tolerance <= tolerance(83, 1.0, 1.0));
    }
    SUBCASE("threaded") {
        EngineOptions o;
        o.threads = 3;
        o.loop = LoopChoice::jr;
        CHECK(verify("goto", {{50, 61, 70}}, 8, o).passed());
    }
    SUBCASE("unregistered") {
        CHECK_THROWS_AS(verify("fastest", {{1, 1, 1}}, 1), std::invalid_argument);
    }
}

TEST_CASE("tune") {
    Config cfg;
    SUBCASE("single point") {
        TuneGrid grid{{4}, {4}, {32}, {32}, {64}};
        const TuneResult r = tune(cfg, grid, 64);
        CHECK(r.best == GotoParams{32, 64, 32, 4, 4, "unrolled"});
        CHECK(r.table.size() == 1);
        CHECK(r.probe_size == 64);
    }
    SUBCASE("invalid points are skipped") {
        TuneGrid grid{{4}, {4}, {30, 32}, {32}, {64}};
        const TuneResult r = tune(cfg, grid, 64);
        CHECK(r.table.size() == 1);
        REQUIRE(r.skipped.size() == 1);
        CHECK(r.skipped[0].find("mc=30 not a multiple of mr=4") != std::string::npos);
    }
    SUBCASE("blocks larger than the probe are skipped") {
        TuneGrid grid{{4}, {4}, {32}, {32}, {64, 4096}};
        const TuneResult r = tune(cfg, grid, 64);
        CHECK(r.table.size() == 1);
        CHECK(r.skipped.size() == 1);
    }
    SUBCASE("empty after filtering") {
        TuneGrid grid{{4}, {4}, {30}, {32}, {64}};
        CHECK_THROWS_AS(tune(cfg, grid, 64), std::invalid_argument);
    }
    SUBCASE("clearly faster point wins in repeated runs") {
        // kc = 1 loads and stores the C tile around every rank-1 update
        TuneGrid grid{{4}, {4}, {64}, {1, 64}, {96}};
        for (int run = 0; run < 2; ++run) {
            const TuneResult r = tune(cfg, grid, 96);
            REQUIRE(r.table.size() == 2);
            CHECK(r.best.kc == 64);
        }
    }
    SUBCASE("grid text") {
        const TuneGrid g = parse_grid_text("# candidates\nmr = 4, 8\nkc = 128,256\n", GotoParams{});
        CHECK(g.mr == std::vector<index_t>{4, 8});
        CHECK(g.nr == std::vector<index_t>{4});
        CHECK(g.kc == std::vector<index_t>{128, 256});
        CHECK(g.nc == std::vector<index_t>{4096});
        CHECK_THROWS_AS(parse_grid_text("mr = four\n", GotoParams{}), ConfigError);
        CHECK_THROWS_AS(parse_grid_text("threads = 2\n", GotoParams{}), ConfigError);
    }
}
