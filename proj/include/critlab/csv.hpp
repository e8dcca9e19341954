#pragma once

#include <string>
#include <utility>
#include <vector>

namespace critlab {

// 17 significant digits (round-trips every double).
std::string format_double(double v);

// Reads a two-column numeric CSV. A non-numeric first line is treated as a
// header and skipped. ConfigError on malformed rows or an unreadable file.
std::vector<std::pair<double, double>> read_two_column_csv(const std::string& path);

}  // namespace critlab
