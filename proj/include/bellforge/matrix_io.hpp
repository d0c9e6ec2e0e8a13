#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "bellforge/tensor_operator.hpp"

namespace bellforge {

/// Raised when a matrix dump cannot be parsed.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Text dump format:
//
//   dims: d1 d2 ...
//   row col re im
//   ...
//
// One line per entry (zeros included), row-major, 0-based indices, 17 significant digits.

template <typename Real>
void write_matrix(std::ostream& os, const TensorOperator<Real>& t) {
  os << "dims:";
  for (Index d : t.dims()) os << ' ' << d;
  os << '\n';
  char buf[96];
  for (Index r = 0; r < t.side(); ++r) {
    for (Index c = 0; c < t.side(); ++c) {
      const auto z = t(r, c);
      std::snprintf(buf, sizeof buf, "%lld %lld %.17g %.17g\n", static_cast<long long>(r),
                    static_cast<long long>(c), static_cast<double>(z.real()), static_cast<double>(z.imag()));
      os << buf;
    }
  }
}

template <typename Real = double>
TensorOperator<Real> read_matrix(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("matrix dump: empty input");
  std::istringstream header(line);
  std::string tag;
  header >> tag;
  if (tag != "dims:") throw FormatError("matrix dump: expected 'dims:' header, got '" + line + "'");
  Dims dims;
  long long d = 0;
  while (header >> d) {
    if (d <= 0) throw FormatError("matrix dump: non-positive factor dimension");
    dims.push_back(static_cast<Index>(d));
  }
  if (!header.eof()) throw FormatError("matrix dump: malformed dims header");
  if (dims.empty()) throw FormatError("matrix dump: no factor dimensions");

  const Index side = TensorOperator<Real>::product(dims);
  if (side > 4096) throw FormatError("matrix dump: operator too large");
  using Matrix = typename TensorOperator<Real>::Matrix;
  Matrix m = Matrix::Zero(side, side);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> seen =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(side, side, false);
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    long long r = -1, c = -1;
    double re = 0, im = 0;
    std::string extra;
    if (!(row >> r >> c >> re >> im) || (row >> extra)) {
      throw FormatError("matrix dump: malformed entry on line " + std::to_string(lineno));
    }
    if (r < 0 || c < 0 || r >= side || c >= side) {
      throw FormatError("matrix dump: index out of range on line " + std::to_string(lineno));
    }
    if (seen(r, c)) throw FormatError("matrix dump: duplicate entry on line " + std::to_string(lineno));
    seen(r, c) = true;
    m(r, c) = {static_cast<Real>(re), static_cast<Real>(im)};
  }
  if (!m.allFinite()) throw FormatError("matrix dump: non-finite entry");
  return {std::move(dims), std::move(m)};
}

template <typename Real>
void save_matrix(const std::string& path, const TensorOperator<Real>& t) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  write_matrix(out, t);
  if (!out) throw FormatError("write to '" + path + "' failed");
}

template <typename Real = double>
TensorOperator<Real> load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  return read_matrix<Real>(in);
}

}  // namespace bellforge
