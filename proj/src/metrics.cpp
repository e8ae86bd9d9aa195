#include "routeboost/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "routeboost/error.hpp"

namespace routeboost {

using nlohmann::json;

double mean_absolute_error(std::span<const double> y, std::span<const double> y_hat) {
    if (y.size() != y_hat.size()) throw Error(ErrorCode::ArityMismatch, "prediction count differs from targets");
    if (y.empty()) throw Error(ErrorCode::InvalidArgument, "MAE of an empty set");
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) acc += std::abs(y[i] - y_hat[i]);
    return acc / static_cast<double>(y.size());
}

std::optional<double> r2_score(std::span<const double> y, std::span<const double> y_hat) {
    if (y.size() != y_hat.size()) throw Error(ErrorCode::ArityMismatch, "prediction count differs from targets");
    if (y.empty()) return std::nullopt;
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    if (*lo == *hi) return std::nullopt;
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double sse = 0.0;
    double sst = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        sse += (y[i] - y_hat[i]) * (y[i] - y_hat[i]);
        sst += (y[i] - mean) * (y[i] - mean);
    }
    return 1.0 - sse / sst;
}

MetricSummary summarize(std::span<const double> y, std::span<const double> y_hat) {
    MetricSummary s;
    s.n = y.size();
    if (s.n > 0) {
        s.mae = mean_absolute_error(y, y_hat);
        s.r2 = r2_score(y, y_hat);
    }
    return s;
}

const StratumMetrics* StratifiedMetrics::find(const std::string& name) const {
    for (const auto& s : strata) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

json to_json(const MetricSummary& m) {
    json j{{"n", m.n}};
    j["mae"] = m.mae ? json(*m.mae) : json("undefined");
    j["r2"] = m.r2 ? json(*m.r2) : json("undefined");
    return j;
}

json to_json(const StratifiedMetrics& m) {
    json strata = json::array();
    for (const auto& s : m.strata) {
        auto entry = to_json(s.metrics);
        entry["name"] = s.name;
        entry["no_applicable"] = s.no_applicable;
        strata.push_back(entry);
    }
    return json{{"strata", strata},
                {"overall", to_json(m.overall)},
                {"skipped", {{"missing_target", m.missing_target},
                             {"unassigned", m.unassigned},
                             {"no_applicable_model", m.no_applicable}}}};
}

namespace {

std::string fixed3(const std::optional<double>& v) {
    if (!v) return "undef";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", *v);
    return buf;
}

std::string pad(const std::string& s, std::size_t width, bool left_align) {
    if (s.size() >= width) return s;
    return left_align ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
}

}  // namespace

std::string render_table(std::span<const MethodRow> rows, std::span<const std::string> strata) {
    // column 0: method; then an MAE/R2 pair per stratum; then an optional note
    std::vector<std::vector<std::string>> body;
    bool any_note = false;
    for (const auto& row : rows) {
        std::vector<std::string> line{row.method};
        for (const auto& s : strata) {
            const StratumMetrics* sm = row.metrics ? row.metrics->find(s) : nullptr;
            if (!sm || sm->metrics.n == 0) {
                line.insert(line.end(), {"n/a", "n/a"});
            } else {
                line.push_back(fixed3(sm->metrics.mae));
                line.push_back(fixed3(sm->metrics.r2));
            }
        }
        line.push_back(row.metrics ? "" : row.note);
        any_note = any_note || !line.back().empty();
        body.push_back(std::move(line));
    }

    std::vector<std::size_t> width(1 + 2 * strata.size(), 3);
    width[0] = 0;
    for (const auto& line : body) {
        for (std::size_t c = 0; c < width.size(); ++c) width[c] = std::max(width[c], line[c].size());
    }
    for (std::size_t k = 0; k < strata.size(); ++k) {
        const std::size_t pair = width[1 + 2 * k] + 3 + width[2 + 2 * k];
        if (strata[k].size() > pair) width[2 + 2 * k] += strata[k].size() - pair;
    }

    auto finish = [](std::string text) {
        while (!text.empty() && text.back() == ' ') text.pop_back();
        return text + '\n';
    };
    std::string title = pad("", width[0], true);
    std::string sub = title;
    for (std::size_t k = 0; k < strata.size(); ++k) {
        const std::size_t pair = width[1 + 2 * k] + 3 + width[2 + 2 * k];
        title += " | " + pad(strata[k], pair, true);
        sub += " | " + pad("MAE", width[1 + 2 * k], false) + "   " + pad("R2", width[2 + 2 * k], false);
    }
    std::string out = finish(title) + finish(sub);
    out += std::string(sub.size(), '-') + '\n';
    for (const auto& line : body) {
        std::string text = pad(line[0], width[0], true);
        for (std::size_t k = 0; k < strata.size(); ++k) {
            text += " | " + pad(line[1 + 2 * k], width[1 + 2 * k], false) + "   " +
                    pad(line[2 + 2 * k], width[2 + 2 * k], false);
        }
        if (any_note && !line.back().empty()) text += " | " + line.back();
        out += finish(text);
    }
    return out;
}

}  // namespace routeboost
