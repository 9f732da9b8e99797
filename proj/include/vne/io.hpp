#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vne/error.hpp"
#include "vne/sparse.hpp"

namespace vne {

/// Shortest form that is still "%.17g": always round-trips a double bit-exactly.
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

[[noreturn]] inline void parse_fail(std::size_t line, const std::string& what) {
  fail(Errc::parse, "matrix market line " + std::to_string(line) + ": " + what);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view tok, T& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

}  // namespace detail

/// Coordinate, real, symmetric; only the lower triangle is written, 1-based.
inline void write_matrix_market(const SparseSymMatrix& r, std::ostream& os) {
  const auto off = r.row_offsets();
  const auto col = r.col_indices();
  const auto val = r.values();
  std::size_t lower = 0;
  for (std::size_t i = 0; i < r.dim(); ++i)
    for (std::size_t p = off[i]; p < off[i + 1]; ++p)
      if (col[p] <= i) ++lower;
  os << "%%MatrixMarket matrix coordinate real symmetric\n";
  os << r.dim() << ' ' << r.dim() << ' ' << lower << '\n';
  for (std::size_t i = 0; i < r.dim(); ++i)
    for (std::size_t p = off[i]; p < off[i + 1]; ++p)
      if (col[p] <= i) os << (i + 1) << ' ' << (col[p] + 1) << ' ' << format_double(val[p]) << '\n';
}

inline void write_matrix_market(const SparseSymMatrix& r, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(Errc::io, "cannot open " + path.string() + " for writing");
  write_matrix_market(r, os);
  if (!os) fail(Errc::io, "write failed: " + path.string());
}

/// Accepts `real` or `integer` fields with `symmetric` or `general` symmetry.
/// Symmetric files may list either triangle but not both; general files must be
/// exactly symmetric.
inline SparseSymMatrix read_matrix_market(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(is, line)) detail::parse_fail(1, "empty input");
  ++lineno;
  const auto header = detail::split_ws(line);
  if (header.size() != 5 || detail::lower(std::string(header[0])) != "%%matrixmarket" ||
      detail::lower(std::string(header[1])) != "matrix")
    detail::parse_fail(lineno, "missing %%MatrixMarket matrix header");
  if (detail::lower(std::string(header[2])) != "coordinate") detail::parse_fail(lineno, "only coordinate format is supported");
  const std::string field = detail::lower(std::string(header[3]));
  if (field != "real" && field != "integer" && field != "double")
    detail::parse_fail(lineno, "unsupported field '" + std::string(header[3]) + "'");
  const std::string symmetry = detail::lower(std::string(header[4]));
  if (symmetry != "symmetric" && symmetry != "general")
    detail::parse_fail(lineno, "unsupported symmetry '" + std::string(header[4]) + "'");
  const bool symmetric = symmetry == "symmetric";

  std::size_t rows = 0, cols = 0, entries = 0;
  bool have_size = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    const auto tok = detail::split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != 3 || !detail::parse_number(tok[0], rows) || !detail::parse_number(tok[1], cols) ||
        !detail::parse_number(tok[2], entries))
      detail::parse_fail(lineno, "malformed size line");
    have_size = true;
    break;
  }
  if (!have_size) detail::parse_fail(lineno, "missing size line");
  if (rows != cols) detail::parse_fail(lineno, "matrix is not square");

  struct Entry {
    double value;
    std::size_t line;
  };
  std::map<std::pair<std::size_t, std::size_t>, Entry> seen;
  std::size_t read = 0;
  while (read < entries && std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    const auto tok = detail::split_ws(line);
    if (tok.empty()) continue;
    std::size_t i = 0, j = 0;
    double v = 0.0;
    if (tok.size() != 3 || !detail::parse_number(tok[0], i) || !detail::parse_number(tok[1], j) ||
        !detail::parse_number(tok[2], v))
      detail::parse_fail(lineno, "malformed entry");
    if (i < 1 || i > rows || j < 1 || j > cols) detail::parse_fail(lineno, "index out of range");
    if (!std::isfinite(v)) detail::parse_fail(lineno, "non-finite value");
    --i;
    --j;
    if (symmetric && i < j) std::swap(i, j);
    if (!seen.emplace(std::make_pair(i, j), Entry{v, lineno}).second) detail::parse_fail(lineno, "duplicate entry");
    ++read;
  }
  if (read != entries)
    detail::parse_fail(lineno, "expected " + std::to_string(entries) + " entries, found " + std::to_string(read));

  std::vector<Triplet> trip;
  trip.reserve(symmetric ? 2 * seen.size() : seen.size());
  for (const auto& [key, e] : seen) {
    trip.push_back({key.first, key.second, e.value});
    if (key.first == key.second) continue;
    if (symmetric) {
      trip.push_back({key.second, key.first, e.value});
    } else {
      const auto mirror = seen.find(std::make_pair(key.second, key.first));
      if (mirror == seen.end() || mirror->second.value != e.value) detail::parse_fail(e.line, "asymmetric data");
    }
  }
  return SparseSymMatrix::from_triplets(rows, std::move(trip));
}

inline SparseSymMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(Errc::io, "cannot open " + path.string());
  return read_matrix_market(is);
}

/// Spectrum sidecar: one probability per line, 17 significant digits.
inline void write_spectrum(std::span<const double> probs, std::ostream& os) {
  for (double p : probs) os << format_double(p) << '\n';
}

inline void write_spectrum(std::span<const double> probs, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(Errc::io, "cannot open " + path.string() + " for writing");
  write_spectrum(probs, os);
}

inline std::vector<double> read_spectrum(std::istream& is) {
  std::vector<double> probs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto tok = detail::split_ws(line);
    if (tok.empty()) continue;
    double v = 0.0;
    if (tok.size() != 1 || !detail::parse_number(tok[0], v))
      fail(Errc::parse, "spectrum line " + std::to_string(lineno) + ": malformed value");
    probs.push_back(v);
  }
  return probs;
}

inline std::vector<double> read_spectrum(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(Errc::io, "cannot open " + path.string());
  return read_spectrum(is);
}

}  // namespace vne
