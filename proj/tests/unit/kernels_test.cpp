#include <gtest/gtest.h>
#include <omp.h>

#include <numeric>
#include <random>

#include "routeboost/kernels.hpp"

namespace routeboost {
namespace {

Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
    std::normal_distribution<double> n(0.0, 3.0);
    Matrix x(rows, cols);
    for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t r = 0; r < rows; ++r) x(r, c) = n(rng);
    }
    return x;
}

class KernelsTest : public ::testing::Test {
protected:
    void SetUp() override {
        saved_ = omp_get_max_threads();
        omp_set_num_threads(4);
    }
    void TearDown() override { omp_set_num_threads(saved_); }

private:
    int saved_ = 1;
};

TEST_F(KernelsTest, CenteredSystemMatchesDirectComputation) {
    const auto x = Matrix::from_rows({{1, 2}, {2, 0}, {3, 5}, {4, 1}});
    const std::vector<double> y{1, 3, 2, 6};
    const auto s = kernels::centered_system_serial(x, y);
    EXPECT_DOUBLE_EQ(s.x_mean[0], 2.5);
    EXPECT_DOUBLE_EQ(s.x_mean[1], 2.0);
    EXPECT_DOUBLE_EQ(s.y_mean, 3.0);
    // centered x0 = -1.5 -0.5 0.5 1.5, x1 = 0 -2 3 -1, y = -2 0 -1 3
    EXPECT_DOUBLE_EQ(s.gram[0], 5.0);
    EXPECT_DOUBLE_EQ(s.gram[1], 1.0);
    EXPECT_DOUBLE_EQ(s.gram[2], 1.0);
    EXPECT_DOUBLE_EQ(s.gram[3], 14.0);
    EXPECT_DOUBLE_EQ(s.rhs[0], 7.0);
    EXPECT_DOUBLE_EQ(s.rhs[1], -6.0);
}

TEST_F(KernelsTest, CenteredSystemSerialParallelBitIdentical) {
    std::mt19937_64 rng(17);
    for (std::size_t cols : {1u, 3u, 9u, 14u}) {
        const auto x = random_matrix(rng, 1537, cols);
        std::vector<double> y(x.rows());
        for (auto& v : y) v = std::normal_distribution<double>(1.0, 2.0)(rng);
        const auto a = kernels::centered_system_serial(x, y);
        const auto b = kernels::centered_system_parallel(x, y);
        EXPECT_EQ(a.x_mean, b.x_mean);
        EXPECT_EQ(a.y_mean, b.y_mean);
        EXPECT_EQ(a.gram, b.gram);
        EXPECT_EQ(a.rhs, b.rhs);
    }
}

// Brute force over every candidate threshold with plain SSE sums.
kernels::SplitCandidate brute_force_split(const Matrix& x, std::span<const double> y, std::size_t min_leaf) {
    auto sse = [](const std::vector<double>& v) {
        if (v.empty()) return 0.0;
        const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double s = 0.0;
        for (double e : v) s += (e - m) * (e - m);
        return s;
    };
    const double total = sse(std::vector<double>(y.begin(), y.end()));
    kernels::SplitCandidate best;
    for (std::size_t f = 0; f < x.cols(); ++f) {
        std::vector<double> values(x.col(f).begin(), x.col(f).end());
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (std::size_t i = 0; i + 1 < values.size(); ++i) {
            const double t = 0.5 * (values[i] + values[i + 1]);
            std::vector<double> l, r;
            for (std::size_t row = 0; row < x.rows(); ++row) (x(row, f) <= t ? l : r).push_back(y[row]);
            if (l.size() < min_leaf || r.size() < min_leaf) continue;
            const double gain = total - sse(l) - sse(r);
            if (best.feature < 0 || gain > best.gain + 1e-9) {
                best = {static_cast<int>(f), t, gain, l.size()};
            }
        }
    }
    return best;
}

TEST_F(KernelsTest, BestSplitStepFunction) {
    const auto x = Matrix::from_rows({{0}, {1}, {2}, {3}});
    const std::vector<double> y{0, 0, 10, 10};
    const std::vector<std::size_t> rows{0, 1, 2, 3};
    const auto s = kernels::best_split_serial(x, y, rows, 1);
    EXPECT_EQ(s.feature, 0);
    EXPECT_DOUBLE_EQ(s.threshold, 1.5);
    EXPECT_EQ(s.n_left, 2u);
    EXPECT_NEAR(s.gain, 100.0, 1e-9);
}

TEST_F(KernelsTest, BestSplitRespectsMinLeaf) {
    const auto x = Matrix::from_rows({{0}, {1}, {2}, {3}});
    const std::vector<double> y{0, 0, 0, 10};
    const std::vector<std::size_t> rows{0, 1, 2, 3};
    EXPECT_DOUBLE_EQ(kernels::best_split_serial(x, y, rows, 1).threshold, 2.5);
    EXPECT_DOUBLE_EQ(kernels::best_split_serial(x, y, rows, 2).threshold, 1.5);
    EXPECT_EQ(kernels::best_split_serial(x, y, rows, 3).feature, -1);
}

TEST_F(KernelsTest, BestSplitTiesGoToLowestFeature) {
    const auto x = Matrix::from_rows({{0, 0}, {1, 1}, {2, 2}, {3, 3}});
    const std::vector<double> y{0, 0, 10, 10};
    const std::vector<std::size_t> rows{0, 1, 2, 3};
    EXPECT_EQ(kernels::best_split_serial(x, y, rows, 1).feature, 0);
    EXPECT_EQ(kernels::best_split_parallel(x, y, rows, 1).feature, 0);
}

TEST_F(KernelsTest, BestSplitConstantFeatureHasNoSplit) {
    const auto x = Matrix::from_rows({{1}, {1}, {1}});
    const std::vector<double> y{1, 2, 3};
    const std::vector<std::size_t> rows{0, 1, 2};
    EXPECT_EQ(kernels::best_split_serial(x, y, rows, 1).feature, -1);
}

TEST_F(KernelsTest, BestSplitMatchesBruteForce) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 40; ++trial) {
        // rounded values create ties between candidate rows
        auto x = random_matrix(rng, 30, 3);
        for (std::size_t c = 0; c < 3; ++c) {
            for (auto& v : x.col(c)) v = std::round(v);
        }
        std::vector<double> y(30);
        for (std::size_t r = 0; r < 30; ++r) y[r] = x(r, trial % 3) > 0 ? 5.0 : -1.0;
        for (auto& v : y) v += std::normal_distribution<double>(0.0, 0.5)(rng);
        std::vector<std::size_t> rows(30);
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        const auto got = kernels::best_split_serial(x, y, rows, 3);
        const auto want = brute_force_split(x, y, 3);
        EXPECT_NEAR(got.gain, want.gain, 1e-9 * std::max(1.0, want.gain));
        EXPECT_EQ(got.feature, want.feature);
        EXPECT_DOUBLE_EQ(got.threshold, want.threshold);
        EXPECT_EQ(got.n_left, want.n_left);
    }
}

TEST_F(KernelsTest, BestSplitSerialParallelIdentical) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = random_matrix(rng, 400, 7);
        std::vector<double> y(400);
        for (std::size_t r = 0; r < 400; ++r) y[r] = x(r, 2) * x(r, 5) + std::normal_distribution<double>()(rng);
        std::vector<std::size_t> rows;
        for (std::size_t r = 0; r < 400; r += 1 + trial % 3) rows.push_back(r);
        const auto a = kernels::best_split_serial(x, y, rows, 5);
        const auto b = kernels::best_split_parallel(x, y, rows, 5);
        EXPECT_EQ(a.feature, b.feature);
        EXPECT_EQ(a.threshold, b.threshold);
        EXPECT_EQ(a.gain, b.gain);
        EXPECT_EQ(a.n_left, b.n_left);
    }
}

}  // namespace
}  // namespace routeboost
