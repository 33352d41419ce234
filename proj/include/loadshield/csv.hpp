#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace loadshield::csv {

// Minimal comma-separated parsing: no quoting, CRLF tolerated, UTF-8 BOM on
// the first line stripped. Field schemas here never contain embedded commas.
std::vector<std::string> split_line(std::string_view line);

// Reads the next line, returns false at EOF. Empty lines are skipped.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line_no);

std::string format_double(double v);  // shortest round-trip representation

void write_record(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace loadshield::csv
