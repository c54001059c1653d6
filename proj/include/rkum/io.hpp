#pragma once

// Plain-text matrix I/O and content hashing used by the command-line tool.

#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rkum/error.hpp"

namespace rkum::io {

/// Shortest text that round-trips: 17 significant digits.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

inline std::string matrix_to_csv(const Eigen::MatrixXd& m,
                                 const std::vector<std::string>& header = {}) {
  std::string s;
  if (!header.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j) s += (j ? "," : "") + header[j];
    s += '\n';
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) s += ',';
      s += format_double(m(i, j));
    }
    s += '\n';
  }
  return s;
}

inline void write_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header = {}) {
  write_file(path, matrix_to_csv(m, header));
}

/// Parses a comma-separated numeric matrix; blank lines are skipped.
inline Eigen::MatrixXd parse_csv(std::string_view text, bool header, const std::string& name) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  bool skipped_header = !header;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      if (end == text.size()) break;
      continue;
    }
    if (!skipped_header) {
      skipped_header = true;
      continue;
    }
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string field =
          line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      const char* b = field.c_str();
      char* e = nullptr;
      errno = 0;
      const double v = std::strtod(b, &e);
      while (e && (*e == ' ' || *e == '\t')) ++e;
      if (e == b || *e != '\0' || errno == ERANGE)
        throw DataError(name + ": line " + std::to_string(line_no) + ": not a number: '" +
                        field + "'");
      row.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw DataError(name + ": line " + std::to_string(line_no) + ": ragged row");
    rows.push_back(std::move(row));
    if (end == text.size()) break;
  }
  if (rows.empty()) throw DataError(name + ": no data rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

inline Eigen::MatrixXd read_csv(const std::filesystem::path& path, bool header = false) {
  return parse_csv(read_file(path), header, path.string());
}

/// 64-bit FNV-1a, rendered as 16 hex digits.
inline std::string fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string file_hash(const std::filesystem::path& path) {
  return fnv1a64(read_file(path));
}

}  // namespace rkum::io
