#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinsnn/csv.hpp"

// Plain-text weight matrix interchange:
//
//   spinsnn-weights v1 <rows> <cols>
//   w00 w01 ... w0,n-1
//   ...
//
// One matrix per file, row-major, %.9g. Used for trained network snapshots
// and for importing externally trained layer weights.

namespace spinsnn {

struct WeightFileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WeightMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> w;  // row-major

  double at(int i, int j) const {
    return w[static_cast<std::size_t>(i) * cols + j];
  }
  double& at(int i, int j) { return w[static_cast<std::size_t>(i) * cols + j]; }

  static WeightMatrix zeros(int rows, int cols) {
    if (rows <= 0 || cols <= 0)
      throw WeightFileError("weight matrix dimensions must be positive");
    WeightMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.w.assign(static_cast<std::size_t>(rows) * cols, 0.0);
    return m;
  }
};

inline void save_weights(const std::string& path, const WeightMatrix& m) {
  if (m.w.size() != static_cast<std::size_t>(m.rows) * m.cols)
    throw WeightFileError(path + ": matrix storage inconsistent with dimensions");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw WeightFileError(path + ": cannot open file for writing");
  out << "spinsnn-weights v1 " << m.rows << " " << m.cols << "\n";
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) {
      if (j) out << ' ';
      out << format_g9(m.at(i, j));
    }
    out << '\n';
  }
  if (!out) throw WeightFileError(path + ": write failed");
}

inline WeightMatrix load_weights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WeightFileError(path + ": cannot open file");

  std::string line;
  if (!std::getline(in, line)) throw WeightFileError(path + ":1: empty file");
  std::istringstream header(line);
  std::string tag, version;
  WeightMatrix m;
  if (!(header >> tag >> version >> m.rows >> m.cols) || tag != "spinsnn-weights")
    throw WeightFileError(path + ":1: expected 'spinsnn-weights v1 <rows> <cols>', got: " +
                          line);
  if (version != "v1")
    throw WeightFileError(path + ":1: unsupported format version '" + version + "'");
  if (m.rows <= 0 || m.cols <= 0)
    throw WeightFileError(path + ":1: implausible dimensions " + std::to_string(m.rows) +
                          " x " + std::to_string(m.cols));
  std::string extra;
  if (header >> extra)
    throw WeightFileError(path + ":1: trailing content after header: " + extra);

  m.w.reserve(static_cast<std::size_t>(m.rows) * m.cols);
  int lineno = 1;
  for (int i = 0; i < m.rows; ++i) {
    if (!std::getline(in, line))
      throw WeightFileError(path + ":" + std::to_string(lineno + 1) +
                            ": missing row " + std::to_string(i) + " of " +
                            std::to_string(m.rows));
    ++lineno;
    std::istringstream row(line);
    for (int j = 0; j < m.cols; ++j) {
      double v;
      if (!(row >> v))
        throw WeightFileError(path + ":" + std::to_string(lineno) + ": row " +
                              std::to_string(i) + " has fewer than " +
                              std::to_string(m.cols) + " values");
      m.w.push_back(v);
    }
    double trailing;
    if (row >> trailing)
      throw WeightFileError(path + ":" + std::to_string(lineno) + ": row " +
                            std::to_string(i) + " has more than " +
                            std::to_string(m.cols) + " values");
  }
  // Anything left beyond whitespace is a shape mismatch.
  std::string rest;
  while (std::getline(in, line)) {
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) rest = line;
    if (!rest.empty())
      throw WeightFileError(path + ": trailing content after " + std::to_string(m.rows) +
                            " rows: " + rest);
    ++lineno;
  }
  return m;
}

}  // namespace spinsnn
