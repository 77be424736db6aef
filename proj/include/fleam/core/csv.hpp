#pragma once

#include <string>
#include <vector>

namespace fleam::csv {

// Splits one CSV line on commas. The formats used by this toolkit never quote
// fields, so no escaping rules apply.
std::vector<std::string> split(const std::string& line);

std::string join(const std::vector<std::string>& fields);

std::string trim(const std::string& s);

// Reads all non-empty lines. Throws ConfigError if the file cannot be opened.
std::vector<std::string> read_lines(const std::string& path);

void write_lines(const std::string& path, const std::vector<std::string>& lines);

}  // namespace fleam::csv
