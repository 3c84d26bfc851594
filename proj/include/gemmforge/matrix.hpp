#pragma once

// Column-major dense matrices with an explicit leading dimension.
//
// Element (i, j) lives at flat offset j * ld + i. Rows m..ld-1 of each column
// are padding: no engine in this library reads or writes them.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <type_traits>

namespace gemmforge {

using index_t = std::size_t;

inline constexpr std::size_t kMatrixAlignment = 64;

constexpr index_t map_index(index_t i, index_t j, index_t ld) noexcept { return j * ld + i; }

/// Owning, 64-byte aligned, zero-initialized array of doubles.
class AlignedBuffer {
public:
    AlignedBuffer() = default;
    explicit AlignedBuffer(std::size_t count);
    AlignedBuffer(const AlignedBuffer& other);
    AlignedBuffer& operator=(const AlignedBuffer& other);
    AlignedBuffer(AlignedBuffer&&) noexcept = default;
    AlignedBuffer& operator=(AlignedBuffer&&) noexcept = default;

    double* data() noexcept { return data_.get(); }
    const double* data() const noexcept { return data_.get(); }
    std::size_t size() const noexcept { return size_; }
    std::span<double> span() noexcept { return {data_.get(), size_}; }
    std::span<const double> span() const noexcept { return {data_.get(), size_}; }

private:
    struct Free {
        void operator()(double* p) const noexcept;
    };
    std::unique_ptr<double[], Free> data_;
    std::size_t size_ = 0;
};

/// Non-owning window onto column-major storage. T is double or const double.
template <typename T>
class BasicMatrixView {
public:
    using value_type = std::remove_const_t<T>;

    BasicMatrixView() = default;
    BasicMatrixView(T* data, index_t rows, index_t cols, index_t ld) noexcept
        : data_(data), rows_(rows), cols_(cols), ld_(ld) {}

    // double view -> const double view
    template <typename U>
        requires(std::is_const_v<T> && std::is_same_v<U, value_type>)
    BasicMatrixView(const BasicMatrixView<U>& other) noexcept
        : data_(other.data()), rows_(other.rows()), cols_(other.cols()), ld_(other.ld()) {}

    T* data() const noexcept { return data_; }
    index_t rows() const noexcept { return rows_; }
    index_t cols() const noexcept { return cols_; }
    index_t ld() const noexcept { return ld_; }

    T& operator()(index_t i, index_t j) const noexcept { return data_[map_index(i, j, ld_)]; }
    T* col(index_t j) const noexcept { return data_ + j * ld_; }

private:
    T* data_ = nullptr;
    index_t rows_ = 0;
    index_t cols_ = 0;
    index_t ld_ = 0;
};

using MatrixView = BasicMatrixView<double>;
using ConstMatrixView = BasicMatrixView<const double>;

/// Owning matrix. Copies are deep.
class Matrix {
public:
    /// Zero-filled m x n matrix. Throws std::invalid_argument on a zero
    /// dimension or ld < m. ld defaults to m.
    Matrix(index_t rows, index_t cols, index_t ld = 0);

    index_t rows() const noexcept { return rows_; }
    index_t cols() const noexcept { return cols_; }
    index_t ld() const noexcept { return ld_; }

    double* data() noexcept { return storage_.data(); }
    const double* data() const noexcept { return storage_.data(); }
    /// The whole backing array, padding included.
    std::span<double> storage() noexcept { return storage_.span(); }
    std::span<const double> storage() const noexcept { return storage_.span(); }

    double& operator()(index_t i, index_t j) noexcept { return storage_.data()[map_index(i, j, ld_)]; }
    double operator()(index_t i, index_t j) const noexcept { return storage_.data()[map_index(i, j, ld_)]; }

    MatrixView view() noexcept { return {data(), rows_, cols_, ld_}; }
    ConstMatrixView view() const noexcept { return {data(), rows_, cols_, ld_}; }
    operator MatrixView() noexcept { return view(); }
    operator ConstMatrixView() const noexcept { return view(); }

private:
    index_t rows_;
    index_t cols_;
    index_t ld_;
    AlignedBuffer storage_;
};

Matrix alloc_matrix(index_t rows, index_t cols, index_t ld);

/// Aliasing window of `rows` x `cols` at (i0, j0); inherits the parent's ld.
/// Throws std::out_of_range if the window leaves the parent.
MatrixView sub_view(MatrixView parent, index_t i0, index_t j0, index_t rows, index_t cols);
ConstMatrixView sub_view(ConstMatrixView parent, index_t i0, index_t j0, index_t rows, index_t cols);

/// Fills every valid element with values uniform in [-1, 1).
///
/// Generator: std::mt19937_64 seeded with `seed`; each draw x maps to
/// 2 * ((x >> 11) * 2^-53) - 1. Elements are visited in column-major order.
/// Padding rows are left alone. Output is identical on every conforming
/// standard library.
void fill_random(MatrixView mat, std::uint64_t seed);

/// Sets every valid element to `value`.
void fill(MatrixView mat, double value);
/// Sets every padding element (rows m..ld-1 of each column) to `value`.
void fill_padding(Matrix& mat, double value);

double max_abs(ConstMatrixView mat);

struct DiffReport {
    double max_abs_diff = 0.0;
    std::optional<index_t> first_bad_i;
    std::optional<index_t> first_bad_j;
    double value_got = 0.0;
    double value_expected = 0.0;

    bool ok() const noexcept { return !first_bad_i.has_value(); }
};

/// Largest |got - want| over valid elements. The first element (column-major
/// scan) whose difference exceeds `tolerance` is recorded along with both
/// values. Throws std::invalid_argument on a shape mismatch.
DiffReport max_abs_diff(ConstMatrixView got, ConstMatrixView want, double tolerance = 0.0);

/// 2mnk. Throws std::overflow_error if it does not fit in 64 bits and
/// std::invalid_argument on a zero dimension.
std::uint64_t flop_count(index_t m, index_t n, index_t k);

/// 2mnk / (seconds * 1e9). Throws std::invalid_argument unless seconds > 0.
double gflops(index_t m, index_t n, index_t k, double seconds);

/// Elementwise forward-error bound used to compare any engine against the
/// triple-loop oracle: 2^-50 * k * max|A| * max|B|.
double tolerance(index_t k, double max_abs_a, double max_abs_b) noexcept;
double tolerance(ConstMatrixView a, ConstMatrixView b);

}  // namespace gemmforge
