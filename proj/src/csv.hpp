#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace routesim::csv {

/// Splits one CSV record. Double-quoted fields may contain commas; no
/// embedded newlines.
std::vector<std::string> split_row(std::string_view line);

/// Shortest decimal representation that round-trips to the same double.
std::string format_number(double value);

/// Fixed significant-digit rendering used for reports ("%.6g" by default).
std::string format_significant(double value, int digits = 6);

/// Strict parsers; throw Error(parse) mentioning `where` on failure.
double parse_double(std::string_view text, std::string_view where);
std::int64_t parse_int(std::string_view text, std::string_view where);

/// Line reader that strips CR, skips blank lines, and tracks line numbers.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::optional<std::string> next();
  std::size_t line_number() const noexcept { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

}  // namespace routesim::csv
