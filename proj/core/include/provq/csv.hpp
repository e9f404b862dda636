#pragma once

#include <cstddef>
#include <string>

namespace provq {

// Shortest round-tripping decimal representation of v. Used everywhere a
// double lands in a text file, so identical runs produce identical bytes.
std::string format_double(double v);

// Parses a double, throwing IoError with file/line context on failure.
double parse_double(const std::string& text, const std::string& origin,
                    std::size_t lineno);

long parse_long(const std::string& text, const std::string& origin,
                std::size_t lineno);

}  // namespace provq
