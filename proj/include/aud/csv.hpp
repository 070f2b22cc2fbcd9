#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace aud::csv {

/// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

void write_record(std::ostream& out, const std::vector<std::string>& fields);

/// RFC 4180 reader: quoted fields, doubled quotes, CRLF or LF line ends.
std::vector<std::vector<std::string>> read(std::istream& in);

}  // namespace aud::csv
