#ifndef FRONTDOOR_DATASET_HPP
#define FRONTDOOR_DATASET_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace frontdoor {

/// Rectangular table of real-valued columns with a per-cell observed mask.
/// Masked cells hold a NaN sentinel that no accessor hands out: values are
/// read through `at` (optional) or through the `*_values` helpers, which
/// either skip masked cells or refuse incomplete columns.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<std::string> names, std::size_t rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return names_.size(); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    /// Throws UnknownColumn.
    std::size_t column(std::string_view name) const;

    std::optional<double> at(std::size_t col, std::size_t row) const;
    bool observed(std::size_t col, std::size_t row) const { return observed_[col][row]; }

    void set(std::size_t col, std::size_t row, double value);
    void set_missing(std::size_t col, std::size_t row);

    std::size_t missing_count(std::size_t col) const;
    bool complete() const;

    /// Values of a fully observed column; throws MissingValue otherwise.
    std::vector<double> complete_values(std::size_t col) const;
    /// Observed values only, in row order.
    std::vector<double> observed_values(std::size_t col) const;
    const std::vector<bool>& observed_mask(std::size_t col) const { return observed_[col]; }

    /// Rows with every cell observed, in order.
    Dataset complete_cases() const;

    bool operator==(const Dataset& other) const;

private:
    std::vector<std::string> names_;
    std::size_t rows_ = 0;
    std::vector<std::vector<double>> values_;
    std::vector<std::vector<bool>> observed_;
};

/// CSV with a header line; missing cells are written as `NA`. Values use
/// the shortest text that reads back to the same double, so a write/read
/// cycle is lossless.
std::string to_csv(const Dataset& data);
Dataset from_csv(std::string_view text);

void write_csv(const Dataset& data, const std::string& path);
/// Throws InputMissing when the file cannot be opened, DataParse on bad content.
Dataset read_csv(const std::string& path);

/// Writes text to a file, throwing Io on failure.
void write_text(const std::string& path, std::string_view text);
std::string read_text(const std::string& path);

std::string format_double(double value);

}  // namespace frontdoor

#endif
