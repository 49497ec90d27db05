#pragma once

#include "sfksd/types.hpp"

#include <string>
#include <vector>

namespace sfksd {

/// Malformed CSV input. row() is the 0-based data row, -1 if unknown.
class CsvError : public std::invalid_argument {
public:
    CsvError(const std::string &what, std::ptrdiff_t row)
        : std::invalid_argument(row >= 0 ? "csv row " + std::to_string(row) + ": " + what : what), row_(row) {}
    std::ptrdiff_t row() const noexcept { return row_; }

private:
    std::ptrdiff_t row_;
};

/// Headerless CSV of decimal floats, one observation per row. Blank lines
/// are skipped; every row must have the same number of fields.
SampleMatrix parse_sample_csv(const std::string &text);
SampleMatrix read_sample_csv(const std::string &path);

/// Shortest round-trippable representation ("%.17g").
std::string format_double(double value);

std::string emit_sample_csv(const SampleMatrix &samples);

/// Splits text into rows of comma-separated fields (no quoting).
std::vector<std::vector<std::string>> split_csv(const std::string &text);

std::string read_text_file(const std::string &path);
void write_text_file(const std::string &path, const std::string &text);

}  // namespace sfksd
