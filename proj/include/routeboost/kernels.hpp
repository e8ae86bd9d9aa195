#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace routeboost {

/// Selects the OpenMP kernel or its serial reference. Both produce
/// bit-identical results; the serial path exists for testing and benchmarking.
enum class Exec { Serial, Parallel };

/// Dense column-major matrix of complete values.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[c * rows_ + r]; }

    std::span<const double> col(std::size_t c) const { return {data_.data() + c * rows_, rows_}; }
    std::span<double> col(std::size_t c) { return {data_.data() + c * rows_, rows_}; }

    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

namespace kernels {

/// Centered normal equations: gram = Xcᵀ Xc (p×p, row-major, full), rhs = Xcᵀ yc.
struct CenteredSystem {
    std::vector<double> x_mean;
    double y_mean = 0.0;
    std::vector<double> gram;
    std::vector<double> rhs;
};

/// Every entry is summed over rows in ascending order, so the serial and
/// parallel variants agree bit-for-bit.
CenteredSystem centered_system_serial(const Matrix& x, std::span<const double> y);
CenteredSystem centered_system_parallel(const Matrix& x, std::span<const double> y);

inline CenteredSystem centered_system(const Matrix& x, std::span<const double> y, Exec exec) {
    return exec == Exec::Serial ? centered_system_serial(x, y) : centered_system_parallel(x, y);
}

struct SplitCandidate {
    int feature = -1;  // -1: no admissible split
    double threshold = 0.0;
    double gain = 0.0;  // SSE reduction
    std::size_t n_left = 0;
};

/// Best variance-reduction split of `rows` over all features. Candidate
/// thresholds are midpoints of consecutive distinct values; both children must
/// keep at least `min_leaf` rows. Ties go to the lowest feature index, then the
/// lowest threshold.
SplitCandidate best_split_serial(const Matrix& x, std::span<const double> y, std::span<const std::size_t> rows,
                                 std::size_t min_leaf);
SplitCandidate best_split_parallel(const Matrix& x, std::span<const double> y, std::span<const std::size_t> rows,
                                   std::size_t min_leaf);

inline SplitCandidate best_split(const Matrix& x, std::span<const double> y, std::span<const std::size_t> rows,
                                 std::size_t min_leaf, Exec exec) {
    return exec == Exec::Serial ? best_split_serial(x, y, rows, min_leaf)
                                : best_split_parallel(x, y, rows, min_leaf);
}

}  // namespace kernels
}  // namespace routeboost
