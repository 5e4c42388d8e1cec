#include "qvshrink/csv.hpp"

#include <stdexcept>

namespace qvshrink::csv {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& field, int line_no) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(field, &used);
  } catch (const std::exception&) {
    used = std::string::npos;
  }
  if (used != field.size() || field.empty()) {
    throw std::runtime_error("line " + std::to_string(line_no) +
                             ": expected a number, got '" + field + "'");
  }
  return value;
}

long parse_long(const std::string& field, int line_no) {
  std::size_t used = 0;
  long value = 0;
  try {
    value = std::stol(field, &used);
  } catch (const std::exception&) {
    used = std::string::npos;
  }
  if (used != field.size() || field.empty()) {
    throw std::runtime_error("line " + std::to_string(line_no) +
                             ": expected an integer, got '" + field + "'");
  }
  return value;
}

}  // namespace qvshrink::csv
