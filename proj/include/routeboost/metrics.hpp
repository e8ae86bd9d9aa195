#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace routeboost {

struct MetricSummary {
    std::size_t n = 0;
    std::optional<double> mae;  // empty when n == 0
    std::optional<double> r2;   // empty when n == 0 or the targets are constant
};

double mean_absolute_error(std::span<const double> y, std::span<const double> y_hat);

/// 1 - SSE/SST with SST taken around the mean of `y`. Empty when `y` is empty
/// or constant.
std::optional<double> r2_score(std::span<const double> y, std::span<const double> y_hat);

MetricSummary summarize(std::span<const double> y, std::span<const double> y_hat);

struct StratumMetrics {
    std::string name;
    MetricSummary metrics;
    std::size_t no_applicable = 0;  // rows of this stratum the model could not score
};

struct StratifiedMetrics {
    std::vector<StratumMetrics> strata;  // in the order the strata were given
    MetricSummary overall;               // every scored row that belongs to a stratum
    std::size_t missing_target = 0;      // skipped: target absent
    std::size_t unassigned = 0;          // skipped: matched no stratum
    std::size_t no_applicable = 0;       // skipped: NoApplicableModel

    const StratumMetrics* find(const std::string& name) const;
};

nlohmann::json to_json(const MetricSummary& m);
nlohmann::json to_json(const StratifiedMetrics& m);

/// One line of a comparison table: either metrics or a reason they are absent.
struct MethodRow {
    std::string method;
    std::optional<StratifiedMetrics> metrics;
    std::string note;  // shown in every cell when metrics are absent
};

/// Aligned plain-text table: one row per method, an MAE/R2 column pair per
/// stratum.
std::string render_table(std::span<const MethodRow> rows, std::span<const std::string> strata);

}  // namespace routeboost
