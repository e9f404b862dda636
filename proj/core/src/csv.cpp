#include "provq/csv.hpp"

#include <charconv>
#include <system_error>

#include "provq/errors.hpp"

namespace provq {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, const std::string& origin,
                    std::size_t lineno) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw IoError(origin + " line " + std::to_string(lineno) +
                  ": bad number '" + text + "'");
  }
  return value;
}

long parse_long(const std::string& text, const std::string& origin,
                std::size_t lineno) {
  long value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw IoError(origin + " line " + std::to_string(lineno) +
                  ": bad integer '" + text + "'");
  }
  return value;
}

}  // namespace provq
