#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include "gemmforge/matrix.hpp"

using namespace gemmforge;

TEST_CASE("map_index is column-major with leading dimension") {
    CHECK(map_index(0, 0, 5) == 0);
    CHECK(map_index(2, 3, 5) == 17);
    // i == ld aliases the next column; callers must keep ld >= m
    CHECK(map_index(4, 0, 4) == 4);
    CHECK(map_index(4, 0, 4) == map_index(0, 1, 4));
}

TEST_CASE("map_index is injective over the valid index set") {
    for (index_t ld : {3, 4, 7}) {
        const index_t m = 3, n = 5;
        std::vector<int> hits(ld * n, 0);
        for (index_t j = 0; j < n; ++j)
            for (index_t i = 0; i < m; ++i) ++hits[map_index(i, j, ld)];
        for (int h : hits) CHECK(h <= 1);
    }
}

TEST_CASE("alloc_matrix") {
    SUBCASE("1x1 zero") {
        Matrix a = alloc_matrix(1, 1, 1);
        CHECK(a.rows() == 1);
        CHECK(a(0, 0) == 0.0);
    }
    SUBCASE("3x2 with ld 5") {
        Matrix a = alloc_matrix(3, 2, 5);
        CHECK(a.storage().size() >= 10);
        for (double v : a.storage()) CHECK(v == 0.0);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(alloc_matrix(4, 4, 3), std::invalid_argument);
        CHECK_THROWS_AS(alloc_matrix(0, 4, 4), std::invalid_argument);
        CHECK_THROWS_AS(alloc_matrix(4, 0, 4), std::invalid_argument);
    }
    SUBCASE("64-byte aligned") {
        for (index_t m : {1, 3, 17}) {
            Matrix a(m, 3);
            CHECK(reinterpret_cast<std::uintptr_t>(a.data()) % 64 == 0);
        }
    }
}

TEST_CASE("element round-trip through map_index for every valid index") {
    Matrix a(5, 4, 7);
    for (index_t j = 0; j < 4; ++j)
        for (index_t i = 0; i < 5; ++i) a.storage()[map_index(i, j, 7)] = 100.0 * i + j;
    for (index_t j = 0; j < 4; ++j)
        for (index_t i = 0; i < 5; ++i) CHECK(a(i, j) == 100.0 * i + j);
}

TEST_CASE("copies are deep") {
    Matrix a(2, 2);
    a(1, 1) = 3.0;
    Matrix b = a;
    b(1, 1) = 4.0;
    CHECK(a(1, 1) == 3.0);
}

TEST_CASE("fill_random") {
    SUBCASE("deterministic") {
        Matrix a(6, 5, 8), b(6, 5, 8);
        fill_random(a, 42);
        fill_random(b, 42);
        for (index_t x = 0; x < a.storage().size(); ++x) CHECK(a.storage()[x] == b.storage()[x]);
    }
    SUBCASE("different seeds differ") {
        Matrix a(4, 4), b(4, 4);
        fill_random(a, 1);
        fill_random(b, 2);
        CHECK(max_abs_diff(a, b).max_abs_diff > 0.0);
    }
    SUBCASE("range [-1, 1)") {
        Matrix a(64, 64);
        fill_random(a, 7);
        for (double v : a.storage()) {
            CHECK(v >= -1.0);
            CHECK(v < 1.0);
        }
    }
    SUBCASE("padding untouched") {
        Matrix a(3, 4, 6);
        fill_padding(a, 9.0);
        fill_random(a, 3);
        for (index_t j = 0; j < 4; ++j)
            for (index_t i = 3; i < 6; ++i) CHECK(a.storage()[j * 6 + i] == 9.0);
    }
    SUBCASE("pinned generator output") {
        // first draw of mt19937_64 with seed 42, mapped to [-1, 1)
        std::mt19937_64 gen(42);
        const double expected = 2.0 * (static_cast<double>(gen() >> 11) * 0x1.0p-53) - 1.0;
        Matrix a(1, 1);
        fill_random(a, 42);
        CHECK(a(0, 0) == expected);
    }
}

TEST_CASE("max_abs_diff") {
    SUBCASE("identical") {
        Matrix a(3, 3);
        fill_random(a, 5);
        const DiffReport r = max_abs_diff(a, a);
        CHECK(r.max_abs_diff == 0.0);
        CHECK(r.ok());
    }
    SUBCASE("single bad element") {
        Matrix want(2, 2), got(2, 2);
        got(1, 0) = 0.5;
        const DiffReport r = max_abs_diff(got, want);
        CHECK(r.max_abs_diff == 0.5);
        REQUIRE(r.first_bad_i.has_value());
        CHECK(*r.first_bad_i == 1);
        CHECK(*r.first_bad_j == 0);
        CHECK(r.value_got == 0.5);
        CHECK(r.value_expected == 0.0);
    }
    SUBCASE("matches exhaustive scan on a random 8x8 pair") {
        Matrix a(8, 8), b(8, 8);
        fill_random(a, 11);
        fill_random(b, 12);
        double brute = 0.0;
        for (index_t j = 0; j < 8; ++j)
            for (index_t i = 0; i < 8; ++i) brute = std::max(brute, std::abs(a(i, j) - b(i, j)));
        CHECK(max_abs_diff(a, b).max_abs_diff == brute);
    }
    SUBCASE("bad index only past the tolerance") {
        Matrix want(2, 2), got(2, 2);
        got(0, 1) = 1e-3;
        CHECK(max_abs_diff(got, want, 1e-2).ok());
        CHECK_FALSE(max_abs_diff(got, want, 1e-4).ok());
    }
    SUBCASE("ld does not matter") {
        Matrix a(5, 3, 5), b(5, 3, 9);
        fill_random(a, 3);
        fill_random(b, 3);  // same draws: fill visits valid elements only
        fill_padding(b, 1e9);
        CHECK(max_abs_diff(a, b).max_abs_diff == 0.0);
    }
    SUBCASE("NaN is a failure") {
        Matrix want(1, 1), got(1, 1);
        got(0, 0) = std::numeric_limits<double>::quiet_NaN();
        CHECK_FALSE(max_abs_diff(got, want, 1.0).ok());
    }
    SUBCASE("shape mismatch") {
        Matrix a(2, 3), b(3, 2);
        CHECK_THROWS_AS(max_abs_diff(a, b), std::invalid_argument);
    }
}

TEST_CASE("flop_count") {
    CHECK(flop_count(16, 16, 16) == 8192);
    CHECK(flop_count(1, 1, 1) == 2);
    CHECK(flop_count(1000, 1000, 1000) == 2'000'000'000ULL);
    CHECK_THROWS_AS(flop_count(0, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(flop_count(1ULL << 32, 1ULL << 32, 1), std::overflow_error);
    CHECK_THROWS_AS(flop_count(1ULL << 21, 1ULL << 21, 1ULL << 21), std::overflow_error);

    std::mt19937 gen(9);
    std::uniform_int_distribution<index_t> dim(1, 5000);
    for (int t = 0; t < 100; ++t) {
        const index_t m = dim(gen), n = dim(gen), k = dim(gen);
        CHECK(flop_count(m, n, k) == flop_count(k, n, m));
        CHECK(flop_count(m, n, k) == flop_count(n, m, k));
    }
}

TEST_CASE("gflops") {
    CHECK(gflops(1000, 1000, 1000, 1.0) == doctest::Approx(2.0));
    CHECK(gflops(16, 16, 16, 8.192e-6) == doctest::Approx(1.0));
    CHECK(gflops(64, 32, 16, 0.5e-3) == doctest::Approx(2.0 * gflops(64, 32, 16, 1e-3)));
    CHECK_THROWS_AS(gflops(1, 1, 1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(gflops(1, 1, 1, -1.0), std::invalid_argument);
}

TEST_CASE("tolerance") {
    CHECK(tolerance(4, 1.0, 1.0) == 4.0 * 0x1.0p-50);
    CHECK(tolerance(3, 2.0, 0.5) == 3.0 * 0x1.0p-50);
}
