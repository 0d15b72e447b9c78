#pragma once

#include <Eigen/SVD>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qcs/common.hpp"
#include "qcs/rng.hpp"

namespace qcs {

struct SparseModel {
  Index n = 0;  // ambient dimension
  Index k = 0;  // sparsity
};

struct LowRankModel {
  Index n1 = 0;
  Index n2 = 0;
  Index r = 0;  // rank budget; ambient dimension is n1 * n2
};

using SignalModel = std::variant<SparseModel, LowRankModel>;

inline void validate(const SignalModel& model) {
  if (const auto* s = std::get_if<SparseModel>(&model)) {
    detail::require(s->n >= 1, "sparse model: n must be positive");
    detail::require(s->k >= 1 && s->k <= s->n,
                    "sparse model: need 1 <= k <= n, got k=" + std::to_string(s->k) +
                        " n=" + std::to_string(s->n));
  } else {
    const auto& l = std::get<LowRankModel>(model);
    detail::require(l.n1 >= 1 && l.n2 >= 1, "low-rank model: n1 and n2 must be positive");
    detail::require(l.r >= 1 && l.r <= std::min(l.n1, l.n2),
                    "low-rank model: need 1 <= r <= min(n1, n2), got r=" + std::to_string(l.r));
  }
}

inline Index ambient_dim(const SignalModel& model) {
  if (const auto* s = std::get_if<SparseModel>(&model)) return s->n;
  const auto& l = std::get<LowRankModel>(model);
  return l.n1 * l.n2;
}

inline std::string_view to_token(const SignalModel& model) {
  return std::holds_alternative<SparseModel>(model) ? "sparse" : "lowrank";
}

inline Index complexity_param(const SignalModel& model) {
  if (const auto* s = std::get_if<SparseModel>(&model)) return s->k;
  return std::get<LowRankModel>(model).r;
}

/// A signal in vectorized form. Matrix signals carry their (n1, n2) shape and
/// are column-stacked.
struct Signal {
  Vector data;
  std::optional<std::pair<Index, Index>> shape;
};

/// Hard thresholding: zero all but the k largest-magnitude entries. Ties on
/// |z_i| keep the smaller index. The result minimizes ||z - u|| over k-sparse u.
inline Vector project_sparse(const Vector& z, Index k) {
  detail::require(k >= 1 && k <= z.size(),
                  "project_sparse: need 1 <= k <= n, got k=" + std::to_string(k) +
                      " n=" + std::to_string(z.size()));
  if (k == z.size()) return z;
  std::vector<Index> order(static_cast<std::size_t>(z.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::partial_sort(order.begin(), order.begin() + k, order.end(), [&z](Index a, Index b) {
    const double fa = std::abs(z[a]), fb = std::abs(z[b]);
    return fa > fb || (fa == fb && a < b);
  });
  Vector out = Vector::Zero(z.size());
  for (Index i = 0; i < k; ++i) {
    const Index j = order[static_cast<std::size_t>(i)];
    out[j] = z[j];
  }
  return out;
}

/// SVD truncation to rank r; Frobenius-optimal rank-r approximation.
inline Matrix project_lowrank_matrix(const Matrix& z, Index r) {
  detail::require(r >= 1 && r <= std::min(z.rows(), z.cols()),
                  "project_lowrank: need 1 <= r <= min(n1, n2), got r=" + std::to_string(r));
  Eigen::JacobiSVD<Matrix> svd(z, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success)
    throw std::runtime_error("project_lowrank: SVD did not converge");
  Vector s = svd.singularValues();
  for (Index i = r; i < s.size(); ++i) s[i] = 0.0;
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

inline Signal project_lowrank(const Signal& z, Index r) {
  detail::require(z.shape.has_value(), "project_lowrank: signal has no matrix shape");
  const auto [n1, n2] = *z.shape;
  detail::require(z.data.size() == n1 * n2, "project_lowrank: data length does not match shape");
  Eigen::Map<const Matrix> as_matrix(z.data.data(), n1, n2);
  Matrix truncated = project_lowrank_matrix(as_matrix, r);
  Signal out;
  out.shape = z.shape;
  out.data = Eigen::Map<const Vector>(truncated.data(), n1 * n2);
  return out;
}

/// Projects a vectorized point onto the model's set.
inline Signal project(const SignalModel& model, const Vector& z) {
  validate(model);
  detail::require(z.size() == ambient_dim(model),
                  "project: vector length does not match the model's ambient dimension");
  if (const auto* s = std::get_if<SparseModel>(&model))
    return Signal{project_sparse(z, s->k), std::nullopt};
  const auto& l = std::get<LowRankModel>(model);
  Signal wrapped{z, std::make_pair(l.n1, l.n2)};
  return project_lowrank(wrapped, l.r);
}

/// Unit-norm k-sparse signal: support uniform over size-k subsets (partial
/// Fisher-Yates, stored ascending), on-support entries standard normal in
/// support order, then normalized to ||x|| = 1.
inline Signal gen_sparse(const SparseModel& model, std::uint64_t seed) {
  validate(SignalModel{model});
  Rng rng(seed);
  std::vector<Index> perm(static_cast<std::size_t>(model.n));
  std::iota(perm.begin(), perm.end(), Index{0});
  for (Index i = 0; i < model.k; ++i) {
    const Index j =
        i + static_cast<Index>(rng.bounded(static_cast<std::uint64_t>(model.n - i)));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  std::vector<Index> support(perm.begin(), perm.begin() + model.k);
  std::sort(support.begin(), support.end());
  Vector x = Vector::Zero(model.n);
  for (Index idx : support) x[idx] = rng.normal();
  const double norm = x.norm();
  if (norm == 0.0) return gen_sparse(model, splitmix64(seed ^ 0xdead));  // measure-zero redraw
  x /= norm;
  return Signal{std::move(x), std::nullopt};
}

/// Unit-Frobenius rank-r matrix X = c B C^T with B, C standard normal,
/// column-stacked into a vector of length n1 * n2.
inline Signal gen_lowrank(const LowRankModel& model, std::uint64_t seed) {
  validate(SignalModel{model});
  Rng rng(seed);
  Matrix b(model.n1, model.r), c(model.n2, model.r);
  for (Index col = 0; col < model.r; ++col)
    for (Index row = 0; row < model.n1; ++row) b(row, col) = rng.normal();
  for (Index col = 0; col < model.r; ++col)
    for (Index row = 0; row < model.n2; ++row) c(row, col) = rng.normal();
  Matrix x = b * c.transpose();
  const double norm = x.norm();  // Frobenius
  if (norm == 0.0) {
    const std::uint64_t retry = splitmix64(seed ^ 0xdead);
    Rng rng2(retry);
    for (Index col = 0; col < model.r; ++col)
      for (Index row = 0; row < model.n1; ++row) b(row, col) = rng2.normal();
    for (Index col = 0; col < model.r; ++col)
      for (Index row = 0; row < model.n2; ++row) c(row, col) = rng2.normal();
    x = b * c.transpose();
    if (x.norm() == 0.0) throw std::runtime_error("gen_lowrank: degenerate zero factor product");
  }
  x /= x.norm();
  Signal out;
  out.shape = std::make_pair(model.n1, model.n2);
  out.data = Eigen::Map<const Vector>(x.data(), model.n1 * model.n2);
  return out;
}

inline Signal generate(const SignalModel& model, std::uint64_t seed) {
  if (const auto* s = std::get_if<SparseModel>(&model)) return gen_sparse(*s, seed);
  return gen_lowrank(std::get<LowRankModel>(model), seed);
}

}  // namespace qcs
