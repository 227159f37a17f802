#include "cocycle/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace cocycle::io {

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::row() {
  rows_.emplace_back();
  return *this;
}

CsvTable& CsvTable::cell(const std::string& text) {
  if (rows_.empty()) throw std::logic_error("CsvTable::cell called before row()");
  // RFC 4180 quoting for fields containing separators or quotes.
  if (text.find_first_of(",\"\n") != std::string::npos) {
    std::string quoted = "\"";
    for (char c : text) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    rows_.back().push_back(quoted + "\"");
  } else {
    rows_.back().push_back(text);
  }
  return *this;
}

CsvTable& CsvTable::cell(double value) { return cell(format_real(value)); }

CsvTable& CsvTable::cell(long value) { return cell(std::to_string(value)); }

void CsvTable::write(std::ostream& out) const {
  auto line = [&out](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i];
    out << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
}

std::string CsvTable::str() const {
  std::ostringstream out;
  write(out);
  return out.str();
}

}  // namespace cocycle::io
