#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pmor/sparse/sparse_matrix.hpp"

namespace pmor {

class MatrixMarketError : public std::runtime_error {
 public:
  explicit MatrixMarketError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Reads a coordinate-format Matrix Market stream. Real, integer and pattern
/// fields are promoted to complex; symmetric, skew-symmetric and hermitian
/// files are expanded to general storage.
inline SparseMatrix read_matrix_market(std::istream& in, const std::string& source = "<stream>") {
  std::string line;
  if (!std::getline(in, line)) throw MatrixMarketError(source + ": empty input");
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") throw MatrixMarketError(source + ": missing %%MatrixMarket banner");
  object = detail::lower(object);
  format = detail::lower(format);
  field = detail::lower(field);
  symmetry = detail::lower(symmetry);
  if (object != "matrix") throw MatrixMarketError(source + ": unsupported object '" + object + "'");
  if (format != "coordinate")
    throw MatrixMarketError(source + ": only coordinate format is supported, got '" + format + "'");
  if (field != "real" && field != "complex" && field != "integer" && field != "pattern" &&
      field != "double")
    throw MatrixMarketError(source + ": unsupported field '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric" &&
      symmetry != "hermitian")
    throw MatrixMarketError(source + ": unsupported symmetry '" + symmetry + "'");

  do {
    if (!std::getline(in, line)) throw MatrixMarketError(source + ": missing size line");
  } while (line.empty() || line[0] == '%');
  long long nrows = 0, ncols = 0, entries = 0;
  {
    std::istringstream sz(line);
    if (!(sz >> nrows >> ncols >> entries) || nrows < 0 || ncols < 0 || entries < 0)
      throw MatrixMarketError(source + ": malformed size line '" + line + "'");
  }
  if (symmetry != "general" && nrows != ncols)
    throw MatrixMarketError(source + ": symmetric storage requires a square matrix");

  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(symmetry == "general" ? entries : 2 * entries));
  long long read = 0;
  while (read < entries && std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream es(line);
    long long i = 0, j = 0;
    double re = 1.0, im = 0.0;
    if (!(es >> i >> j)) throw MatrixMarketError(source + ": malformed entry '" + line + "'");
    if (field != "pattern" && !(es >> re))
      throw MatrixMarketError(source + ": missing value in '" + line + "'");
    if (field == "complex" && !(es >> im))
      throw MatrixMarketError(source + ": missing imaginary part in '" + line + "'");
    if (i < 1 || i > nrows || j < 1 || j > ncols)
      throw MatrixMarketError(source + ": index out of bounds (" + std::to_string(i) + ", " +
                              std::to_string(j) + ")");
    const Complex v(re, im);
    triplets.push_back({i - 1, j - 1, v});
    if (i != j) {
      if (symmetry == "symmetric") triplets.push_back({j - 1, i - 1, v});
      else if (symmetry == "skew-symmetric") triplets.push_back({j - 1, i - 1, -v});
      else if (symmetry == "hermitian") triplets.push_back({j - 1, i - 1, std::conj(v)});
    }
    ++read;
  }
  if (read != entries)
    throw MatrixMarketError(source + ": expected " + std::to_string(entries) + " entries, read " +
                            std::to_string(read));
  return SparseMatrix::from_triplets(nrows, ncols, std::move(triplets));
}

inline SparseMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MatrixMarketError("cannot open " + path.string());
  return read_matrix_market(in, path.string());
}

/// Writes general coordinate storage, one entry per stored value, 17
/// significant digits. The field is "real" when every imaginary part is zero.
inline void write_matrix_market(const SparseMatrix& a, std::ostream& out) {
  const auto vals = a.values();
  const bool is_real =
      std::all_of(vals.begin(), vals.end(), [](const Complex& v) { return v.imag() == 0.0; });
  out << "%%MatrixMarket matrix coordinate " << (is_real ? "real" : "complex") << " general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  for (Index r = 0; r < a.rows(); ++r) {
    for (Index k = rp[r]; k < rp[r + 1]; ++k) {
      out << (r + 1) << ' ' << (ci[k] + 1) << ' ' << detail::format_double(vals[k].real());
      if (!is_real) out << ' ' << detail::format_double(vals[k].imag());
      out << '\n';
    }
  }
}

inline void write_matrix_market(const SparseMatrix& a, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw MatrixMarketError("cannot write " + path.string());
  write_matrix_market(a, out);
  if (!out) throw MatrixMarketError("write failed for " + path.string());
}

inline void write_matrix_market(const DenseBlock& a, const std::filesystem::path& path) {
  write_matrix_market(from_dense(a), path);
}

inline DenseBlock read_dense_matrix_market(const std::filesystem::path& path) {
  return to_dense(read_matrix_market(path));
}

}  // namespace pmor
