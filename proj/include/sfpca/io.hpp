#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sfpca/errors.hpp"
#include "sfpca/types.hpp"

namespace sfpca {

/// Round-trip-safe decimal rendering: 17 significant digits.
inline std::string fmt17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

inline std::string json_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

/// FNV-1a 64-bit digest, used to fingerprint canonicalized configs.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::string to_hex(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Points file: CSV with header x0,...,xD and one point per row. Columns are
/// written with 17 significant digits. The space kind and curvature are
/// supplied out of band (flags or config), never inferred from the file.
inline std::string points_csv_header(Index coord_size) {
  std::string header;
  for (Index i = 0; i < coord_size; ++i) {
    if (i) header += ',';
    header += "x" + std::to_string(i);
  }
  return header;
}

inline void write_points_csv(const std::string& path, const Matrix& points) {
  std::ostringstream out;
  out << points_csv_header(points.rows()) << '\n';
  for (Index c = 0; c < points.cols(); ++c) {
    for (Index r = 0; r < points.rows(); ++r) {
      if (r) out << ',';
      out << fmt17(points(r, c));
    }
    out << '\n';
  }
  write_text_file(path, out.str());
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace detail

/// Reads a points CSV; returns a (D+1) x N matrix with points as columns.
/// Errors carry the 1-based line number of the first offending row.
inline Matrix read_points_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open points file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const std::vector<std::string> header = detail::split_csv_line(line);
  const Index width = static_cast<Index>(header.size());
  if (width == 0) throw IoError(path + ": empty header");
  for (Index i = 0; i < width; ++i) {
    if (header[static_cast<size_t>(i)] != "x" + std::to_string(i))
      throw IoError(path + ": header must be x0..x" + std::to_string(width - 1) +
                    ", got '" + header[static_cast<size_t>(i)] + "' in column " +
                    std::to_string(i));
  }

  std::vector<Vector> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = detail::split_csv_line(line);
    if (static_cast<Index>(fields.size()) != width)
      throw IoError(path + ": line " + std::to_string(line_no) + " has " +
                    std::to_string(fields.size()) + " fields, expected " +
                    std::to_string(width));
    Vector row(width);
    for (Index i = 0; i < width; ++i) {
      try {
        size_t used = 0;
        row[i] = std::stod(fields[static_cast<size_t>(i)], &used);
        if (used != fields[static_cast<size_t>(i)].size())
          throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw IoError(path + ": line " + std::to_string(line_no) +
                      ", column " + std::to_string(i) + ": not a number: '" +
                      fields[static_cast<size_t>(i)] + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(path + ": no data rows");

  Matrix points(width, static_cast<Index>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i)
    points.col(static_cast<Index>(i)) = rows[i];
  return points;
}

}  // namespace sfpca
