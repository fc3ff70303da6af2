#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace driftev {

inline constexpr std::string_view kCsvSchemaVersion = "1";

/// Shortest decimal that reads back to the same double ("nan", "inf", "-inf"
/// for non-finite values).
std::string format_double(double v);

/// UTC time as 2026-01-31T12:00:00Z.
std::string utc_timestamp();

/// CSV file with two comment lines (schema id and timestamp) followed by a
/// column header. Every row must have as many cells as there are columns.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::string_view schema,
              std::vector<std::string> columns);

    void row(const std::vector<double>& values);
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t width_;
};

}  // namespace driftev
