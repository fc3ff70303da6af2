#include "driftev/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>

#include "driftev/error.hpp"

namespace driftev {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::string_view schema,
                     std::vector<std::string> columns)
    : path_(path), out_(path), width_(columns.size()) {
    if (!out_) throw InvalidArgument("cannot open " + path.string() + " for writing");
    out_ << "# driftev-csv v" << kCsvSchemaVersion << " " << schema << '\n';
    out_ << "# generated " << utc_timestamp() << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != width_) throw InvalidArgument("CSV row width does not match header");
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
    out_ << '\n';
    if (!out_) throw Error("write failed for " + path_.string());
}

}  // namespace driftev
