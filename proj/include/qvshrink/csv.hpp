#pragma once

#include <string>
#include <vector>

namespace qvshrink::csv {

/// Split one CSV line on commas; fields are trimmed of surrounding spaces.
/// No quoting support; the formats here are purely numeric/identifier.
std::vector<std::string> split(const std::string& line);

/// Strict numeric parses that name the line on failure.
double parse_double(const std::string& field, int line_no);
long parse_long(const std::string& field, int line_no);

}  // namespace qvshrink::csv
