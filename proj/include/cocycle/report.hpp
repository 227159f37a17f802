#pragma once

// CSV report tables. Reals are written with 17 significant digits so that
// every double round-trips; infinities are written as inf / -inf.

#include <ostream>
#include <string>
#include <vector>

namespace cocycle::io {

std::string format_real(double value);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable& row();
  CsvTable& cell(const std::string& text);
  CsvTable& cell(double value);
  CsvTable& cell(long value);
  CsvTable& cell(int value) { return cell(static_cast<long>(value)); }

  std::size_t size() const { return rows_.size(); }
  void write(std::ostream& out) const;
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace cocycle::io
