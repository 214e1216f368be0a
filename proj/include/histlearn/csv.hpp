#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace histlearn {

// Shortest decimal that round-trips to the same double.
std::string format_number(double value);

std::vector<std::string> split_csv_line(std::string_view line);

double parse_number(std::string_view text);

}  // namespace histlearn
