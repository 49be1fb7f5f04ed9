#ifndef ECZ_CSV_HPP
#define ECZ_CSV_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace ecz::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Plain comma-separated UTF-8, '.' decimal point, no quoting. Values in this
// project never contain commas.
Table read_file(const std::filesystem::path& path);

std::vector<std::string> split_line(const std::string& line);

// Strict double parse; throws MalformedNumber with (row, column) context.
double parse_number(const std::string& field, int row, const std::string& col);

// Shortest-width formatting that round-trips a double exactly (17 significant
// digits).
std::string format_number(double v);

void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace ecz::csv

#endif
