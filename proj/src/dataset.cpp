#include "routeboost/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "routeboost/error.hpp"

namespace routeboost {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

double parse_number(std::string_view field, std::size_t line_no) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = field.data() + field.size();
    if (!field.empty() && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw Error(ErrorCode::MalformedCsv,
                    "line " + std::to_string(line_no) + ": cannot parse '" + std::string(field) + "' as a finite number");
    }
    return value;
}

std::string format_number(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

Dataset::Dataset(std::vector<Column> columns, std::optional<SignalId> target)
    : columns_(std::move(columns)), target_(std::move(target)) {
    std::unordered_set<std::string_view> seen;
    n_rows_ = columns_.empty() ? 0 : columns_.front().size();
    for (const auto& col : columns_) {
        if (col.name.empty() || col.name.find_first_of(",\n\r") != std::string::npos) {
            throw Error(ErrorCode::MalformedCsv, "invalid signal name '" + col.name + "'");
        }
        if (!seen.insert(col.name).second) throw Error(ErrorCode::DuplicateSignal, col.name);
        if (col.values.size() != n_rows_ || col.present.size() != n_rows_) {
            throw Error(ErrorCode::MalformedCsv, "column '" + col.name + "' has inconsistent length");
        }
        for (std::size_t r = 0; r < n_rows_; ++r) {
            if (col.present[r] && !std::isfinite(col.values[r])) {
                throw Error(ErrorCode::MalformedCsv, "non-finite value in column '" + col.name + "'");
            }
        }
    }
    if (target_ && !seen.contains(*target_)) throw Error(ErrorCode::UnknownTarget, *target_);
}

const Column& Dataset::column(std::string_view name) const {
    const auto idx = index_of(name);
    if (!idx) throw Error(ErrorCode::UnknownSignal, std::string(name));
    return columns_[*idx];
}

SignalSet Dataset::signals() const {
    SignalSet out;
    out.reserve(columns_.size());
    for (const auto& c : columns_) out.push_back(c.name);
    return out;
}

std::optional<std::size_t> Dataset::index_of(std::string_view name) const noexcept {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (columns_[i].name == name) return i;
    }
    return std::nullopt;
}

const SignalId& Dataset::target() const {
    if (!target_) throw Error(ErrorCode::UnknownTarget, "dataset has no designated target");
    return *target_;
}

std::size_t Dataset::target_index() const { return *index_of(target()); }

std::optional<double> Dataset::at(std::size_t row, std::size_t col) const {
    const auto& c = columns_.at(col);
    if (row >= n_rows_) throw Error(ErrorCode::RowOutOfRange, std::to_string(row));
    if (!c.present[row]) return std::nullopt;
    return c.values[row];
}

SignalSet Dataset::present_signals(std::size_t row) const {
    SignalSet out;
    for (const auto& c : columns_) {
        if (c.present[row]) out.push_back(c.name);
    }
    return out;
}

SignalSet Dataset::feature_signals() const {
    SignalSet out;
    for (const auto& c : columns_) {
        if (!target_ || c.name != *target_) out.push_back(c.name);
    }
    return out;
}

SignalSet Dataset::canonical_order(std::span<const SignalId> names) const {
    std::vector<std::size_t> idx;
    idx.reserve(names.size());
    for (const auto& n : names) {
        const auto i = index_of(n);
        if (!i) throw Error(ErrorCode::UnknownSignal, n);
        idx.push_back(*i);
    }
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    SignalSet out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(columns_[i].name);
    return out;
}

std::size_t AvailabilityMask::row_count(std::size_t r) const {
    std::size_t n = 0;
    for (std::size_t c = 0; c < cols; ++c) n += cells[r * cols + c];
    return n;
}

Dataset parse_csv(std::string_view text, std::optional<SignalId> target) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = nl + 1;
    }
    if (lines.empty()) throw Error(ErrorCode::MalformedCsv, "missing header line");
    // UTF-8 byte order mark
    if (lines.front().starts_with("\xEF\xBB\xBF")) lines.front().remove_prefix(3);

    const auto header = split_fields(lines.front());
    std::vector<Column> columns(header.size());
    std::unordered_set<std::string_view> seen;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i].empty()) throw Error(ErrorCode::MalformedCsv, "empty signal name in header");
        if (!seen.insert(header[i]).second) throw Error(ErrorCode::DuplicateSignal, std::string(header[i]));
        columns[i].name = std::string(header[i]);
    }
    if (target && !seen.contains(*target)) throw Error(ErrorCode::UnknownTarget, *target);

    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto fields = split_fields(lines[li]);
        if (fields.size() != columns.size()) {
            throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(li + 1) + ": expected " +
                                                     std::to_string(columns.size()) + " fields, got " +
                                                     std::to_string(fields.size()));
        }
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (fields[c].empty()) {
                columns[c].values.push_back(0.0);
                columns[c].present.push_back(0);
            } else {
                columns[c].values.push_back(parse_number(fields[c], li + 1));
                columns[c].present.push_back(1);
            }
        }
    }
    return Dataset(std::move(columns), std::move(target));
}

Dataset load_dataset(const std::filesystem::path& path, const SignalId& target) {
    return parse_csv(read_file(path), target);
}

Dataset read_csv(const std::filesystem::path& path) { return parse_csv(read_file(path)); }

std::string to_csv(const Dataset& dataset) {
    std::string out;
    const auto& cols = dataset.columns();
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (c) out += ',';
        out += cols[c].name;
    }
    out += '\n';
    for (std::size_t r = 0; r < dataset.n_rows(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (c) out += ',';
            if (cols[c].present[r]) out += format_number(cols[c].values[r]);
        }
        out += '\n';
    }
    return out;
}

void write_csv(const Dataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
    out << to_csv(dataset);
}

Dataset project(const Dataset& dataset, std::span<const SignalId> keep, std::span<const std::size_t> rows) {
    const auto kept = dataset.canonical_order(keep);
    for (auto r : rows) {
        if (r >= dataset.n_rows()) throw Error(ErrorCode::RowOutOfRange, std::to_string(r));
    }
    std::vector<Column> columns;
    columns.reserve(kept.size());
    for (const auto& name : kept) {
        const auto& src = dataset.column(name);
        Column col{name, {}, {}};
        col.values.reserve(rows.size());
        col.present.reserve(rows.size());
        for (auto r : rows) {
            col.values.push_back(src.values[r]);
            col.present.push_back(src.present[r]);
        }
        columns.push_back(std::move(col));
    }
    std::optional<SignalId> target;
    if (dataset.has_target() && std::find(kept.begin(), kept.end(), dataset.target()) != kept.end()) {
        target = dataset.target();
    }
    return Dataset(std::move(columns), std::move(target));
}

Dataset select_rows(const Dataset& dataset, std::span<const std::size_t> rows) {
    const auto all = dataset.signals();
    return project(dataset, all, rows);
}

AvailabilityMask availability_mask(const Dataset& dataset) {
    AvailabilityMask mask;
    mask.rows = dataset.n_rows();
    mask.cols = dataset.n_signals();
    mask.cells.resize(mask.rows * mask.cols);
    for (std::size_t c = 0; c < mask.cols; ++c) {
        const auto& present = dataset.column(c).present;
        for (std::size_t r = 0; r < mask.rows; ++r) mask.cells[r * mask.cols + c] = present[r];
    }
    return mask;
}

Dataset coalesce(const Dataset& dataset, const SignalId& merged, std::span<const SignalId> sources) {
    if (sources.empty()) throw Error(ErrorCode::InvalidArgument, "coalesce '" + merged + "' has no sources");
    std::vector<std::size_t> src_idx;
    for (const auto& s : sources) {
        const auto i = dataset.index_of(s);
        if (!i) throw Error(ErrorCode::UnknownSignal, s);
        src_idx.push_back(*i);
    }
    const std::size_t n = dataset.n_rows();
    Column out{merged, std::vector<double>(n, 0.0), std::vector<unsigned char>(n, 0)};
    for (std::size_t r = 0; r < n; ++r) {
        for (auto i : src_idx) {
            const auto& col = dataset.column(i);
            if (!col.present[r]) continue;
            if (!out.present[r]) {
                out.values[r] = col.values[r];
                out.present[r] = 1;
            } else if (std::abs(out.values[r] - col.values[r]) > 1e-9) {
                throw Error(ErrorCode::ConflictingValues,
                            "row " + std::to_string(r) + ": sources of '" + merged + "' disagree");
            }
        }
    }

    const auto first = *std::min_element(src_idx.begin(), src_idx.end());
    std::vector<Column> columns;
    for (std::size_t c = 0; c < dataset.n_signals(); ++c) {
        if (c == first) columns.push_back(out);
        if (std::find(src_idx.begin(), src_idx.end(), c) != src_idx.end()) continue;
        columns.push_back(dataset.column(c));
    }
    std::optional<SignalId> target;
    if (dataset.has_target()) {
        const auto& t = dataset.target();
        if (std::find(sources.begin(), sources.end(), t) != sources.end()) {
            throw Error(ErrorCode::InvalidArgument, "cannot coalesce the target signal '" + t + "'");
        }
        target = t;
    }
    return Dataset(std::move(columns), std::move(target));
}

}  // namespace routeboost
