#pragma once

#include <Eigen/Dense>

#include <charconv>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qcs {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

namespace detail {

inline void require(bool cond, const std::string& message) {
  if (!cond) throw std::invalid_argument(message);
}

}  // namespace detail

/// Shortest round-trip decimal form of a double (used for CSV/SVG output so
/// that emitted files are byte-stable across runs and thread counts).
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Fixed-precision decimal form (plot coordinates).
inline std::string format_fixed(double v, int precision) {
  char buf[48];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, precision);
  return std::string(buf, res.ptr);
}

}  // namespace qcs
