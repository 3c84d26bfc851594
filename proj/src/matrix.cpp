#include "gemmforge/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <new>
#include <random>
#include <string>

namespace gemmforge {

void AlignedBuffer::Free::operator()(double* p) const noexcept { std::free(p); }

AlignedBuffer::AlignedBuffer(std::size_t count) : size_(count) {
    if (count == 0) return;
    // aligned_alloc wants a size that is a multiple of the alignment
    std::size_t bytes = count * sizeof(double);
    bytes = (bytes + kMatrixAlignment - 1) / kMatrixAlignment * kMatrixAlignment;
    auto* p = static_cast<double*>(std::aligned_alloc(kMatrixAlignment, bytes));
    if (p == nullptr) throw std::bad_alloc();
    std::memset(p, 0, bytes);
    data_.reset(p);
}

AlignedBuffer::AlignedBuffer(const AlignedBuffer& other) : AlignedBuffer(other.size_) {
    if (size_ != 0) std::memcpy(data_.get(), other.data_.get(), size_ * sizeof(double));
}

AlignedBuffer& AlignedBuffer::operator=(const AlignedBuffer& other) {
    if (this != &other) *this = AlignedBuffer(other);
    return *this;
}

Matrix::Matrix(index_t rows, index_t cols, index_t ld)
    : rows_(rows), cols_(cols), ld_(ld == 0 ? rows : ld) {
    if (rows_ == 0 || cols_ == 0) throw std::invalid_argument("matrix dimensions must be >= 1");
    if (ld_ < rows_) {
        throw std::invalid_argument("leading dimension " + std::to_string(ld_) + " < rows " +
                                    std::to_string(rows_));
    }
    storage_ = AlignedBuffer(ld_ * cols_);
}

Matrix alloc_matrix(index_t rows, index_t cols, index_t ld) {
    if (ld == 0) throw std::invalid_argument("leading dimension must be >= 1");
    return Matrix(rows, cols, ld);
}

namespace {

template <typename T>
BasicMatrixView<T> make_window(BasicMatrixView<T> parent, index_t i0, index_t j0, index_t rows,
                               index_t cols) {
    if (i0 > parent.rows() || rows > parent.rows() - i0 || j0 > parent.cols() ||
        cols > parent.cols() - j0) {
        throw std::out_of_range("sub_view window [" + std::to_string(i0) + "+" +
                                std::to_string(rows) + ", " + std::to_string(j0) + "+" +
                                std::to_string(cols) + ") outside " +
                                std::to_string(parent.rows()) + "x" +
                                std::to_string(parent.cols()));
    }
    return {parent.data() + map_index(i0, j0, parent.ld()), rows, cols, parent.ld()};
}

}  // namespace

MatrixView sub_view(MatrixView parent, index_t i0, index_t j0, index_t rows, index_t cols) {
    return make_window(parent, i0, j0, rows, cols);
}

ConstMatrixView sub_view(ConstMatrixView parent, index_t i0, index_t j0, index_t rows,
                         index_t cols) {
    return make_window(parent, i0, j0, rows, cols);
}

void fill_random(MatrixView mat, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    constexpr double kScale = 0x1.0p-53;
    for (index_t j = 0; j < mat.cols(); ++j) {
        double* col = mat.col(j);
        for (index_t i = 0; i < mat.rows(); ++i) {
            const double u = static_cast<double>(gen() >> 11) * kScale;  // [0, 1)
            col[i] = 2.0 * u - 1.0;
        }
    }
}

void fill(MatrixView mat, double value) {
    for (index_t j = 0; j < mat.cols(); ++j) std::fill_n(mat.col(j), mat.rows(), value);
}

void fill_padding(Matrix& mat, double value) {
    for (index_t j = 0; j < mat.cols(); ++j) {
        std::fill(mat.data() + j * mat.ld() + mat.rows(), mat.data() + (j + 1) * mat.ld(), value);
    }
}

double max_abs(ConstMatrixView mat) {
    double best = 0.0;
    for (index_t j = 0; j < mat.cols(); ++j)
        for (index_t i = 0; i < mat.rows(); ++i) best = std::max(best, std::abs(mat(i, j)));
    return best;
}

DiffReport max_abs_diff(ConstMatrixView got, ConstMatrixView want, double tolerance) {
    if (got.rows() != want.rows() || got.cols() != want.cols()) {
        throw std::invalid_argument("max_abs_diff: shape mismatch " + std::to_string(got.rows()) +
                                    "x" + std::to_string(got.cols()) + " vs " +
                                    std::to_string(want.rows()) + "x" +
                                    std::to_string(want.cols()));
    }
    DiffReport report;
    for (index_t j = 0; j < got.cols(); ++j) {
        for (index_t i = 0; i < got.rows(); ++i) {
            const double d = std::abs(got(i, j) - want(i, j));
            // NaN never compares greater; treat it as a failure explicitly
            const bool bad = std::isnan(d) || d > tolerance;
            if (bad && !report.first_bad_i) {
                report.first_bad_i = i;
                report.first_bad_j = j;
                report.value_got = got(i, j);
                report.value_expected = want(i, j);
            }
            if (std::isnan(d))
                report.max_abs_diff = std::numeric_limits<double>::infinity();
            else
                report.max_abs_diff = std::max(report.max_abs_diff, d);
        }
    }
    return report;
}

std::uint64_t flop_count(index_t m, index_t n, index_t k) {
    if (m == 0 || n == 0 || k == 0) throw std::invalid_argument("flop_count: dimensions must be >= 1");
    std::uint64_t mn = 0, mnk = 0, total = 0;
    if (__builtin_mul_overflow(static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(n), &mn) ||
        __builtin_mul_overflow(mn, static_cast<std::uint64_t>(k), &mnk) ||
        __builtin_mul_overflow(mnk, std::uint64_t{2}, &total)) {
        throw std::overflow_error("flop_count: 2*m*n*k overflows 64 bits");
    }
    return total;
}

double gflops(index_t m, index_t n, index_t k, double seconds) {
    if (!(seconds > 0.0)) throw std::invalid_argument("gflops: elapsed time must be positive");
    return static_cast<double>(flop_count(m, n, k)) / (seconds * 1e9);
}

double tolerance(index_t k, double max_abs_a, double max_abs_b) noexcept {
    return 0x1.0p-50 * static_cast<double>(k) * max_abs_a * max_abs_b;
}

double tolerance(ConstMatrixView a, ConstMatrixView b) {
    return tolerance(a.cols(), max_abs(a), max_abs(b));
}

}  // namespace gemmforge
