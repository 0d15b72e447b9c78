#pragma once

#include <string>

#include "qcs/common.hpp"
#include "qcs/models.hpp"
#include "qcs/quantize.hpp"
#include "qcs/sensing.hpp"

namespace qcs {

/// a = (1/m) Phi^T y.
inline Vector back_project(const SensingOperator& op, const Vector& y) {
  detail::require(y.size() == op.rows(), "back_project: expected vector of length " +
                                             std::to_string(op.rows()) + ", got " +
                                             std::to_string(y.size()));
  return op.apply_adjoint(y) / static_cast<double>(op.rows());
}

/// Projected back projection: the model's nearest point to (1/m) Phi^T y.
inline Signal reconstruct(const QuantizedMap& map, const Vector& y, const SignalModel& model) {
  detail::require(ambient_dim(model) == map.op().cols(),
                  "reconstruct: model ambient dimension does not match the operator");
  return project(model, back_project(map.op(), y));
}

/// l2 norm of the difference (Frobenius norm for matrix signals).
inline double reconstruction_error(const Signal& x, const Signal& xhat) {
  detail::require(x.data.size() == xhat.data.size(),
                  "reconstruction_error: signals have different ambient dimensions");
  detail::require(x.shape == xhat.shape, "reconstruction_error: signals have different shapes");
  return (x.data - xhat.data).norm();
}

}  // namespace qcs
