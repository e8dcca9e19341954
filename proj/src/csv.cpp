#include "critlab/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

#include "critlab/errors.hpp"

namespace critlab {

std::string format_double(double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

std::vector<std::pair<double, double>> read_two_column_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open table file '" + path + "'");
  std::vector<std::pair<double, double>> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header_allowed = true;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    double a = 0.0;
    double b = 0.0;
    const bool ok = comma != std::string::npos && parse_number(line.substr(0, comma), a) &&
                    parse_number(line.substr(comma + 1), b);
    if (!ok) {
      if (header_allowed) {
        header_allowed = false;
        continue;
      }
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected two numeric columns");
    }
    header_allowed = false;
    rows.emplace_back(a, b);
  }
  return rows;
}

}  // namespace critlab
