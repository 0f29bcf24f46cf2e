#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ccr {

// Locale-free numeric text. Doubles are written with 17 significant
// digits so parsing recovers the exact bits; infinities round-trip as
// "inf"/"-inf" and NaN as "nan".
std::string format_double(double value);
std::string format_int(std::int64_t value);
std::string format_uint(std::uint64_t value);

double parse_double(const std::string& field, const std::string& column);
std::int64_t parse_int(const std::string& field, const std::string& column);
std::uint64_t parse_uint(const std::string& field, const std::string& column);

/// Plain comma split; fields in this project never contain commas.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace ccr
