#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

// CSV emission for sweep results and reports. Columns carry their unit in the
// header name (current_A, probability, energy_J, ...). All numbers are
// printed with %.9g so a file regenerated from the same run is byte-identical
// regardless of platform printf quirks with wider precisions.

namespace spinsnn {

inline std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
    if (columns_.empty()) throw std::invalid_argument("csv: need at least one column");
  }

  void add_row(const std::vector<double>& values) {
    if (values.size() != columns_.size())
      throw std::invalid_argument("csv: row has " + std::to_string(values.size()) +
                                  " values, table has " + std::to_string(columns_.size()) +
                                  " columns");
    rows_.push_back(values);
  }

  std::size_t row_count() const { return rows_.size(); }

  std::string str() const {
    std::string out;
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      if (c) out += ',';
      out += columns_[c];
    }
    out += '\n';
    for (const auto& row : rows_) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out += ',';
        out += format_g9(row[c]);
      }
      out += '\n';
    }
    return out;
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(path + ": cannot open file for writing");
    const std::string text = str();
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error(path + ": write failed");
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

}  // namespace spinsnn
