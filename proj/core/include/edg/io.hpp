#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace edg {

// Round-trip-exact decimal rendering of a double (17 significant digits,
// '.' separator, C locale).
std::string format_double(double x);

// CSV writer with a fixed header; all numeric cells go through
// format_double so outputs are byte-stable across runs.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    void add_row(const std::vector<double>& row);
    std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<double>> rows_;
};

// FNV-1a 64-bit, stable across platforms.
std::uint64_t fnv1a64(const std::string& data);
std::string hex64(std::uint64_t v);

void write_text_file(const std::string& path, const std::string& content);

} // namespace edg
