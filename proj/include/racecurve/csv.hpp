#pragma once
#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace racecurve::csv {

// Plain comma-separated fields; no quoting. Fields are trimmed.
std::vector<std::string> split(std::string_view line);

std::string trim(std::string_view s);
std::string lower(std::string_view s);

// Shortest text that parses back to the same double.
std::string format_double(double x);

double parse_double(std::string_view field, const std::string& source, std::size_t line);
std::int64_t parse_int(std::string_view field, const std::string& source, std::size_t line);
std::uint64_t parse_uint(std::string_view field, const std::string& source, std::size_t line);

// Reads the next non-empty line that is not a '#' comment. Returns false at
// end of input. `line_no` tracks the physical line number.
bool next_record(std::istream& in, std::string& line, std::size_t& line_no);

}  // namespace racecurve::csv
