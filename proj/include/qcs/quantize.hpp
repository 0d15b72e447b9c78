#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include "qcs/common.hpp"
#include "qcs/rng.hpp"
#include "qcs/sensing.hpp"

namespace qcs {

enum class DitherMode { None, Uniform };

/// delta * floor(t / delta). Satisfies t - delta < result <= t.
inline double quantize_scalar(double t, double delta) {
  detail::require(delta > 0.0, "quantize_scalar: resolution must be positive, got delta=" +
                                   format_double(delta));
  return delta * std::floor(t / delta);
}

/// m iid uniform draws on [0, delta), deterministic in `seed`.
inline Vector draw_dither(Index m, double delta, std::uint64_t seed) {
  detail::require(m >= 1, "draw_dither: m must be positive, got " + std::to_string(m));
  detail::require(delta > 0.0,
                  "draw_dither: resolution must be positive, got delta=" + format_double(delta));
  Rng rng(seed);
  Vector xi(m);
  for (Index i = 0; i < m; ++i) {
    double v = delta * rng.uniform01();
    if (v >= delta) v = std::nextafter(delta, 0.0);  // guard against round-up at the edge
    xi[i] = v;
  }
  return xi;
}

/// The observation map y = Q(Phi x + xi) on the lattice delta * Z^m.
/// With DitherMode::None the dither is identically zero. Immutable; observe
/// is pure and safe to call concurrently.
class QuantizedMap {
 public:
  QuantizedMap(SensingOperator op, double delta, DitherMode mode, std::uint64_t dither_seed)
      : op_(std::move(op)), delta_(delta), mode_(mode), dither_seed_(dither_seed) {
    detail::require(delta_ > 0.0,
                    "quantized map: resolution must be positive, got delta=" + format_double(delta_));
    dither_ = (mode_ == DitherMode::Uniform) ? draw_dither(op_.rows(), delta_, dither_seed_)
                                             : Vector::Zero(op_.rows());
  }

  /// Wraps an explicit dither vector (hand-built instances, tests).
  static QuantizedMap with_dither(SensingOperator op, double delta, Vector dither) {
    detail::require(dither.size() == op.rows(), "with_dither: dither length must equal m");
    QuantizedMap map(std::move(op), delta, DitherMode::None, 0);
    map.mode_ = DitherMode::Uniform;
    map.dither_ = std::move(dither);
    return map;
  }

  const SensingOperator& op() const { return op_; }
  double delta() const { return delta_; }
  DitherMode mode() const { return mode_; }
  std::uint64_t dither_seed() const { return dither_seed_; }
  const Vector& dither() const { return dither_; }

  /// y = Q(Phi x + xi), componentwise.
  Vector observe(const Vector& x) const {
    Vector y = op_.apply(x);
    for (Index i = 0; i < y.size(); ++i)
      y[i] = delta_ * std::floor((y[i] + dither_[i]) / delta_);
    return y;
  }

  /// The undistorted baseline Phi x (no dither, no quantization).
  Vector observe_linear(const Vector& x) const { return op_.apply(x); }

 private:
  SensingOperator op_;
  double delta_;
  DitherMode mode_;
  std::uint64_t dither_seed_;
  Vector dither_;
};

}  // namespace qcs
