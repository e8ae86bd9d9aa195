#include "routeboost/kernels.hpp"

#include <algorithm>
#include <utility>

#include <omp.h>

#include "routeboost/error.hpp"

namespace routeboost {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    Matrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) throw Error(ErrorCode::ArityMismatch, "ragged row " + std::to_string(r));
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
    }
    return m;
}

namespace kernels {

namespace {

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

CenteredSystem prepare(const Matrix& x, std::span<const double> y) {
    if (y.size() != x.rows()) throw Error(ErrorCode::ArityMismatch, "target length differs from row count");
    if (x.rows() == 0) throw Error(ErrorCode::EmptyTrainingSet, "no rows");
    CenteredSystem sys;
    const std::size_t p = x.cols();
    sys.x_mean.resize(p);
    for (std::size_t c = 0; c < p; ++c) sys.x_mean[c] = mean_of(x.col(c));
    sys.y_mean = mean_of(y);
    sys.gram.assign(p * p, 0.0);
    sys.rhs.assign(p, 0.0);
    return sys;
}

void mirror_lower(CenteredSystem& sys, std::size_t p) {
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < i; ++j) sys.gram[i * p + j] = sys.gram[j * p + i];
    }
}

// Per-feature best split; `order` is scratch space.
SplitCandidate best_for_feature(const Matrix& x, std::span<const double> centered_y, std::span<const std::size_t> rows,
                                std::size_t min_leaf, std::size_t feature,
                                std::vector<std::pair<double, std::size_t>>& order) {
    const auto col = x.col(feature);
    order.clear();
    for (std::size_t i = 0; i < rows.size(); ++i) order.emplace_back(col[rows[i]], i);
    std::sort(order.begin(), order.end());

    const std::size_t m = rows.size();
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) total += centered_y[i];
    const double parent_score = total * total / static_cast<double>(m);

    SplitCandidate best;
    double left = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        left += centered_y[order[i].second];
        const std::size_t n_left = i + 1;
        const std::size_t n_right = m - n_left;
        if (order[i].first == order[i + 1].first) continue;
        if (n_left < min_leaf || n_right < min_leaf) continue;
        const double right = total - left;
        const double gain = left * left / static_cast<double>(n_left) +
                            right * right / static_cast<double>(n_right) - parent_score;
        if (best.feature < 0 || gain > best.gain) {
            const double lo = order[i].first;
            const double hi = order[i + 1].first;
            double threshold = lo + (hi - lo) / 2.0;
            if (!(threshold < hi)) threshold = lo;
            best = {static_cast<int>(feature), threshold, gain, n_left};
        }
    }
    return best;
}

std::vector<double> centered_targets(std::span<const double> y, std::span<const std::size_t> rows) {
    double mean = 0.0;
    for (auto r : rows) mean += y[r];
    mean /= static_cast<double>(rows.size());
    std::vector<double> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) out[i] = y[rows[i]] - mean;
    return out;
}

}  // namespace

CenteredSystem centered_system_serial(const Matrix& x, std::span<const double> y) {
    auto sys = prepare(x, y);
    const std::size_t p = x.cols();
    std::vector<double> d(p);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t i = 0; i < p; ++i) d[i] = x(r, i) - sys.x_mean[i];
        const double dy = y[r] - sys.y_mean;
        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t j = i; j < p; ++j) sys.gram[i * p + j] += d[i] * d[j];
            sys.rhs[i] += d[i] * dy;
        }
    }
    mirror_lower(sys, p);
    return sys;
}

CenteredSystem centered_system_parallel(const Matrix& x, std::span<const double> y) {
    auto sys = prepare(x, y);
    const std::size_t p = x.cols();
    const std::size_t n = x.rows();
    // Upper-triangle entries plus one rhs entry per feature (j == p).
    std::vector<std::pair<std::size_t, std::size_t>> entries;
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i; j <= p; ++j) entries.emplace_back(i, j);
    }
    const auto count = static_cast<std::ptrdiff_t>(entries.size());

#pragma omp parallel for schedule(dynamic, 1) if (n * entries.size() > 4096)
    for (std::ptrdiff_t e = 0; e < count; ++e) {
        const auto [i, j] = entries[static_cast<std::size_t>(e)];
        const auto xi = x.col(i);
        const double mi = sys.x_mean[i];
        double acc = 0.0;
        if (j == p) {
            for (std::size_t r = 0; r < n; ++r) acc += (xi[r] - mi) * (y[r] - sys.y_mean);
            sys.rhs[i] = acc;
        } else {
            const auto xj = x.col(j);
            const double mj = sys.x_mean[j];
            for (std::size_t r = 0; r < n; ++r) acc += (xi[r] - mi) * (xj[r] - mj);
            sys.gram[i * p + j] = acc;
        }
    }
    mirror_lower(sys, p);
    return sys;
}

SplitCandidate best_split_serial(const Matrix& x, std::span<const double> y, std::span<const std::size_t> rows,
                                 std::size_t min_leaf) {
    if (rows.size() < 2) return {};
    const auto cy = centered_targets(y, rows);
    std::vector<std::pair<double, std::size_t>> order;
    SplitCandidate best;
    for (std::size_t f = 0; f < x.cols(); ++f) {
        const auto cand = best_for_feature(x, cy, rows, min_leaf, f, order);
        if (cand.feature >= 0 && (best.feature < 0 || cand.gain > best.gain)) best = cand;
    }
    return best;
}

SplitCandidate best_split_parallel(const Matrix& x, std::span<const double> y, std::span<const std::size_t> rows,
                                   std::size_t min_leaf) {
    if (rows.size() < 2) return {};
    const auto cy = centered_targets(y, rows);
    const auto p = static_cast<std::ptrdiff_t>(x.cols());
    std::vector<SplitCandidate> per_feature(x.cols());

#pragma omp parallel if (rows.size() * x.cols() > 8192)
    {
        std::vector<std::pair<double, std::size_t>> order;
#pragma omp for schedule(dynamic, 1)
        for (std::ptrdiff_t f = 0; f < p; ++f) {
            per_feature[static_cast<std::size_t>(f)] =
                best_for_feature(x, cy, rows, min_leaf, static_cast<std::size_t>(f), order);
        }
    }

    SplitCandidate best;
    for (const auto& cand : per_feature) {
        if (cand.feature >= 0 && (best.feature < 0 || cand.gain > best.gain)) best = cand;
    }
    return best;
}

}  // namespace kernels
}  // namespace routeboost
