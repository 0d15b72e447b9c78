#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "qcs/common.hpp"
#include "qcs/rng.hpp"

namespace qcs {

enum class MatrixKind { DenseGaussian, PartialDct, DenseBernoulli };

inline std::string_view to_token(MatrixKind kind) {
  switch (kind) {
    case MatrixKind::DenseGaussian: return "gaussian";
    case MatrixKind::PartialDct: return "partial-dct";
    case MatrixKind::DenseBernoulli: return "bernoulli";
  }
  return "?";
}

/// A realized random measurement matrix with forward/adjoint application.
///
/// Dense kinds store the m-by-n payload. PartialDct stores only the m selected
/// row indices (sorted ascending) and acts as sqrt(n) times the corresponding
/// rows of the orthonormal type-II DCT matrix
///   D[k][j] = s_k * sqrt(2/n) * cos(pi * (2j+1) * k / (2n)),
/// with s_0 = 1/sqrt(2) and s_k = 1 otherwise. Rows are drawn uniformly
/// without replacement. Operators are immutable after construction.
class SensingOperator {
 public:
  static SensingOperator gaussian(Index m, Index n, std::uint64_t seed) {
    detail::require(m >= 1 && n >= 1, "gaussian operator: m and n must be positive, got m=" +
                                          std::to_string(m) + " n=" + std::to_string(n));
    SensingOperator op(MatrixKind::DenseGaussian, m, n, seed);
    Rng rng(seed);
    op.dense_.resize(m, n);
    // Entries are drawn row by row so the stream layout is reproducible.
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j) op.dense_(i, j) = rng.normal();
    return op;
  }

  static SensingOperator bernoulli(Index m, Index n, std::uint64_t seed) {
    detail::require(m >= 1 && n >= 1, "bernoulli operator: m and n must be positive, got m=" +
                                          std::to_string(m) + " n=" + std::to_string(n));
    SensingOperator op(MatrixKind::DenseBernoulli, m, n, seed);
    Rng rng(seed);
    op.dense_.resize(m, n);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j) op.dense_(i, j) = (rng.next_u64() >> 63) ? 1.0 : -1.0;
    return op;
  }

  static SensingOperator partial_dct(Index m, Index n, std::uint64_t seed) {
    detail::require(m >= 1 && m <= n, "partial-dct operator: need 1 <= m <= n, got m=" +
                                          std::to_string(m) + " n=" + std::to_string(n));
    SensingOperator op(MatrixKind::PartialDct, m, n, seed);
    // Partial Fisher-Yates: the first m entries of a seeded shuffle of [0, n).
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    Rng rng(seed);
    for (Index i = 0; i < m; ++i) {
      const Index j = i + static_cast<Index>(rng.bounded(static_cast<std::uint64_t>(n - i)));
      std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    op.rows_.assign(perm.begin(), perm.begin() + m);
    std::sort(op.rows_.begin(), op.rows_.end());  // canonical ascending order
    op.build_cos_table();
    return op;
  }

  /// Wraps an explicit dense payload (hand-built instances, tests).
  static SensingOperator from_dense(Matrix payload, MatrixKind kind = MatrixKind::DenseGaussian,
                                    std::uint64_t seed = 0) {
    detail::require(payload.rows() >= 1 && payload.cols() >= 1,
                    "from_dense: payload must be non-empty");
    detail::require(kind != MatrixKind::PartialDct, "from_dense: partial-dct has no dense payload");
    SensingOperator op(kind, payload.rows(), payload.cols(), seed);
    op.dense_ = std::move(payload);
    return op;
  }

  MatrixKind kind() const { return kind_; }
  Index rows() const { return m_; }
  Index cols() const { return n_; }
  std::uint64_t seed() const { return seed_; }

  const Matrix& dense() const {
    detail::require(kind_ != MatrixKind::PartialDct, "dense(): operator is implicit");
    return dense_;
  }
  const std::vector<Index>& dct_rows() const { return rows_; }

  /// y = Phi x.
  Vector apply(const Vector& x) const {
    detail::require(x.size() == n_, "apply: expected vector of length " + std::to_string(n_) +
                                        ", got " + std::to_string(x.size()));
    if (kind_ != MatrixKind::PartialDct) return dense_ * x;
    Vector y(m_);
    const Index period = 4 * n_;
    for (Index r = 0; r < m_; ++r) {
      const Index k = rows_[static_cast<std::size_t>(r)];
      // sqrt(n) * D[k][j] = s_k * sqrt(2) * cos(pi * (2j+1) k / (2n));
      // the angle index (2j+1)k mod 4n advances by 2k per column.
      const Index step = 2 * k;
      Index idx = k;
      double acc = 0.0;
      for (Index j = 0; j < n_; ++j) {
        acc += cos_table_[static_cast<std::size_t>(idx)] * x[j];
        idx += step;
        if (idx >= period) idx -= period;
      }
      y[r] = acc * (k == 0 ? 1.0 : std::sqrt(2.0));
    }
    return y;
  }

  /// x = Phi^T y (exact adjoint of apply).
  Vector apply_adjoint(const Vector& y) const {
    detail::require(y.size() == m_, "apply_adjoint: expected vector of length " +
                                        std::to_string(m_) + ", got " + std::to_string(y.size()));
    if (kind_ != MatrixKind::PartialDct) return dense_.transpose() * y;
    Vector x = Vector::Zero(n_);
    const Index period = 4 * n_;
    for (Index r = 0; r < m_; ++r) {
      const Index k = rows_[static_cast<std::size_t>(r)];
      const double w = y[r] * (k == 0 ? 1.0 : std::sqrt(2.0));
      if (w == 0.0) continue;
      const Index step = 2 * k;
      Index idx = k;
      for (Index j = 0; j < n_; ++j) {
        x[j] += w * cos_table_[static_cast<std::size_t>(idx)];
        idx += step;
        if (idx >= period) idx -= period;
      }
    }
    return x;
  }

 private:
  SensingOperator(MatrixKind kind, Index m, Index n, std::uint64_t seed)
      : kind_(kind), m_(m), n_(n), seed_(seed) {}

  void build_cos_table() {
    const Index period = 4 * n_;
    cos_table_.resize(static_cast<std::size_t>(period));
    const double pi = 3.141592653589793238462643383279502884;
    for (Index i = 0; i < period; ++i)
      cos_table_[static_cast<std::size_t>(i)] =
          std::cos(pi * static_cast<double>(i) / (2.0 * static_cast<double>(n_)));
  }

  MatrixKind kind_;
  Index m_;
  Index n_;
  std::uint64_t seed_;
  Matrix dense_;              // DenseGaussian / DenseBernoulli
  std::vector<Index> rows_;   // PartialDct selected rows, ascending
  std::vector<double> cos_table_;  // cos(pi i / (2n)), i in [0, 4n)
};

}  // namespace qcs
