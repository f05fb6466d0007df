#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace patheval::csv {

// Splits one CSV line. Double-quoted fields may contain commas; "" inside a
// quoted field is a literal quote. A trailing '\r' is ignored.
std::vector<std::string> split_line(std::string_view line);

// Quotes a field only when it contains a comma, quote or newline.
std::string escape(std::string_view field);

// Formats a double with enough digits to round-trip.
std::string format_double(double value);

std::string trim(std::string_view s);

}  // namespace patheval::csv
