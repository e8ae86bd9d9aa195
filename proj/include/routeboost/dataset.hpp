#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace routeboost {

using SignalId = std::string;
using SignalSet = std::vector<SignalId>;  // kept in dataset column order

/// One sensor channel. A cell is either present (value) or missing; there is no
/// third state, and NaN is never used as a missing marker.
struct Column {
    SignalId name;
    std::vector<double> values;         // unspecified where !present
    std::vector<unsigned char> present;  // 1 = available

    std::size_t size() const noexcept { return values.size(); }
};

/// Column-oriented table of optional reals with an optional designated target.
/// Immutable after construction.
class Dataset {
public:
    Dataset() = default;

    /// Validates shape and naming; throws DuplicateSignal, UnknownTarget,
    /// MalformedCsv (ragged columns, non-finite values).
    Dataset(std::vector<Column> columns, std::optional<SignalId> target);

    std::size_t n_rows() const noexcept { return n_rows_; }
    std::size_t n_signals() const noexcept { return columns_.size(); }

    const std::vector<Column>& columns() const noexcept { return columns_; }
    const Column& column(std::size_t index) const { return columns_.at(index); }
    const Column& column(std::string_view name) const;

    SignalSet signals() const;
    std::optional<std::size_t> index_of(std::string_view name) const noexcept;
    bool has_signal(std::string_view name) const noexcept { return index_of(name).has_value(); }

    bool has_target() const noexcept { return target_.has_value(); }
    const SignalId& target() const;
    std::size_t target_index() const;

    bool present(std::size_t row, std::size_t col) const { return columns_[col].present[row] != 0; }
    std::optional<double> at(std::size_t row, std::size_t col) const;

    /// Present signal names of one row, in column order (target included).
    SignalSet present_signals(std::size_t row) const;

    /// Features-only view of the same dataset column order: signals minus the target.
    SignalSet feature_signals() const;

    /// Sorts a set of names into this dataset's column order; throws UnknownSignal.
    SignalSet canonical_order(std::span<const SignalId> names) const;

private:
    std::vector<Column> columns_;
    std::optional<SignalId> target_;
    std::size_t n_rows_ = 0;
};

/// Row-major boolean availability matrix.
struct AvailabilityMask {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<unsigned char> cells;

    bool operator()(std::size_t r, std::size_t c) const { return cells[r * cols + c] != 0; }
    std::size_t row_count(std::size_t r) const;
};

/// Parses CSV text (header line of signal names, comma separated, empty field
/// = missing, LF or CRLF). An empty `target` means no designated target.
Dataset parse_csv(std::string_view text, std::optional<SignalId> target = std::nullopt);

Dataset load_dataset(const std::filesystem::path& path, const SignalId& target);
Dataset read_csv(const std::filesystem::path& path);

/// Shortest round-trip decimal formatting; missing cells stay empty.
std::string to_csv(const Dataset& dataset);
void write_csv(const Dataset& dataset, const std::filesystem::path& path);

/// Keeps the requested signals (in dataset column order) and rows (in the given
/// order, which callers keep ascending). The target survives iff kept.
Dataset project(const Dataset& dataset, std::span<const SignalId> keep, std::span<const std::size_t> rows);

/// Row subset over all columns.
Dataset select_rows(const Dataset& dataset, std::span<const std::size_t> rows);

AvailabilityMask availability_mask(const Dataset& dataset);

/// Merges `sources` into one column called `merged` placed where the first
/// source was. Per row, whichever source is present wins; two present values
/// differing by more than 1e-9 raise ConflictingValues.
Dataset coalesce(const Dataset& dataset, const SignalId& merged, std::span<const SignalId> sources);

}  // namespace routeboost
