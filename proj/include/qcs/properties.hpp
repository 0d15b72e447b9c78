#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "qcs/analysis.hpp"
#include "qcs/common.hpp"
#include "qcs/models.hpp"
#include "qcs/pbp.hpp"
#include "qcs/quantize.hpp"
#include "qcs/rng.hpp"
#include "qcs/sensing.hpp"

namespace qcs {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;  // measured values
};

struct PropertyReport {
  std::vector<CheckResult> checks;
  bool all_pass() const {
    for (const CheckResult& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

inline void print(const PropertyReport& report, std::ostream& os) {
  for (const CheckResult& c : report.checks)
    os << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  " << c.detail << "\n";
  os << (report.all_pass() ? "all checks passed" : "CHECKS FAILED") << "\n";
}

using ScalarQuantizer = std::function<double(double, double)>;

/// Quantizer bracket t - delta < Q(t, delta) <= t over random inputs.
inline CheckResult check_quantizer_bracket(const ScalarQuantizer& q, std::uint64_t seed,
                                           int draws = 20000) {
  Rng rng(seed);
  double worst_low = 1e300, worst_high = -1e300;
  bool ok = true;
  for (int i = 0; i < draws; ++i) {
    const double t = rng.uniform(-50.0, 50.0);
    const double delta = std::exp(rng.uniform(std::log(1e-3), std::log(16.0)));
    const double v = q(t, delta);
    const double low = (t - v) / delta;   // in [0, 1)
    ok = ok && v <= t && v > t - delta;
    worst_low = std::min(worst_low, low);
    worst_high = std::max(worst_high, low);
  }
  return {"quantizer-bracket",
          ok,
          "(t - Q(t))/delta range [" + format_double(worst_low) + ", " + format_double(worst_high) +
              "), want [0, 1)"};
}

/// Exact dithered unbiasedness on rational lambda = p / q: the expectation of
/// floor(lambda + d) over d ~ U([0,1)) is floor(lambda) + frac(lambda) =
/// lambda. Evaluated in integer arithmetic (times q^2), so equality is exact.
inline CheckResult check_unbiasedness_closed_form(int cases = 20, std::uint64_t seed = 1) {
  Rng rng(seed);
  bool ok = true;
  long long worst = 0;
  for (int i = 0; i < cases; ++i) {
    const long long q = 1 + static_cast<long long>(rng.bounded(97));
    const long long p = static_cast<long long>(rng.bounded(2001)) - 1000;
    // floor(p/q) for possibly negative p
    long long fl = p / q;
    if (p % q != 0 && ((p < 0) != (q < 0))) --fl;
    const long long rem = p - fl * q;  // in [0, q)
    // E[floor(lambda + d)] * q = fl * (q - rem) + (fl + 1) * rem = fl * q + rem = p
    const long long expectation_times_q = fl * (q - rem) + (fl + 1) * rem;
    const long long diff = expectation_times_q - p;
    worst = std::max(worst, std::abs(diff));
    ok = ok && diff == 0;
  }
  return {"quantizer-unbiasedness-exact", ok,
          "max |q*E - p| = " + std::to_string(worst) + " over " + std::to_string(cases) +
              " rational points, want 0"};
}

/// Monte Carlo dithered unbiasedness: |mean of Q(t + xi) - t| <= 0.002 delta.
inline CheckResult check_unbiasedness_monte_carlo(const ScalarQuantizer& q, std::uint64_t seed,
                                                  int pairs = 20, int draws = 1000000) {
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < pairs; ++i) {
    const double t = rng.uniform(-8.0, 8.0);
    const double delta = std::exp(rng.uniform(std::log(0.1), std::log(4.0)));
    Rng draw_rng(mix_seed(seed, static_cast<std::uint64_t>(i) + 1));
    double sum = 0.0;
    for (int d = 0; d < draws; ++d) sum += q(t + delta * draw_rng.uniform01(), delta);
    worst = std::max(worst, std::abs(sum / draws - t) / delta);
  }
  return {"quantizer-unbiasedness-monte-carlo", worst <= 0.002,
          "max |mean - t| / delta = " + format_double(worst) + " over " + std::to_string(pairs) +
              " (t, delta) pairs x " + std::to_string(draws) + " draws, want <= 0.002"};
}

/// Dither support [0, delta) and observation lattice membership.
inline CheckResult check_dither_and_lattice(std::uint64_t seed) {
  Rng rng(seed);
  bool ok = true;
  double worst_rel = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const double delta = std::exp(rng.uniform(std::log(0.05), std::log(8.0)));
    const Vector xi = draw_dither(64, delta, mix_seed(seed, rep));
    for (Index i = 0; i < xi.size(); ++i) ok = ok && xi[i] >= 0.0 && xi[i] < delta;
    SensingOperator op = SensingOperator::gaussian(16, 12, mix_seed(seed, 100 + rep));
    QuantizedMap map(std::move(op), delta, DitherMode::Uniform, mix_seed(seed, 200 + rep));
    Vector x(12);
    for (Index i = 0; i < 12; ++i) x[i] = rng.normal();
    const Vector y = map.observe(x);
    for (Index i = 0; i < y.size(); ++i) {
      const double ratio = y[i] / delta;
      const double rel = std::abs(ratio - std::round(ratio)) / std::max(1.0, std::abs(ratio));
      worst_rel = std::max(worst_rel, rel);
    }
  }
  ok = ok && worst_rel <= 1e-9;
  return {"dither-support-and-lattice", ok,
          "max lattice deviation (relative) = " + format_double(worst_rel) + ", want <= 1e-9"};
}

/// Adjoint identity |<Phi x, y> - <x, Phi^T y>| <= 1e-9 ||x|| ||y||.
inline CheckResult check_adjoint_identity(std::uint64_t seed) {
  double worst = 0.0;
  int idx = 0;
  for (MatrixKind kind :
       {MatrixKind::DenseGaussian, MatrixKind::PartialDct, MatrixKind::DenseBernoulli}) {
    const Index m = 48, n = 96;
    SensingOperator op = kind == MatrixKind::DenseGaussian
                             ? SensingOperator::gaussian(m, n, mix_seed(seed, idx))
                             : kind == MatrixKind::PartialDct
                                   ? SensingOperator::partial_dct(m, n, mix_seed(seed, idx))
                                   : SensingOperator::bernoulli(m, n, mix_seed(seed, idx));
    ++idx;
    Rng rng(mix_seed(seed, 1000 + idx));
    for (int rep = 0; rep < 50; ++rep) {
      Vector x(n), y(m);
      for (Index i = 0; i < n; ++i) x[i] = rng.normal();
      for (Index i = 0; i < m; ++i) y[i] = rng.normal();
      const double lhs = op.apply(x).dot(y);
      const double rhs = x.dot(op.apply_adjoint(y));
      worst = std::max(worst, std::abs(lhs - rhs) / (x.norm() * y.norm()));
    }
  }
  return {"adjoint-identity", worst <= 1e-9,
          "max relative adjoint residual = " + format_double(worst) + ", want <= 1e-9"};
}

/// Full-row partial DCT: (1/m) ||Phi x||^2 = ||x||^2 to 1e-10.
inline CheckResult check_partial_dct_isometry(std::uint64_t seed) {
  const Index n = 32;
  SensingOperator op = SensingOperator::partial_dct(n, n, seed);
  Rng rng(mix_seed(seed, 1));
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    Vector x(n);
    for (Index i = 0; i < n; ++i) x[i] = rng.normal();
    const double got = op.apply(x).squaredNorm() / static_cast<double>(n);
    worst = std::max(worst, std::abs(got - x.squaredNorm()));
  }
  return {"partial-dct-full-row-isometry", worst <= 1e-10,
          "max |(1/m)||Phi x||^2 - ||x||^2| = " + format_double(worst) + ", want <= 1e-10"};
}

/// Hard thresholding against the exhaustive support-enumeration minimizer.
inline CheckResult check_hard_threshold_oracle(std::uint64_t seed, int instances = 200) {
  Rng rng(seed);
  double worst = 0.0;
  for (int inst = 0; inst < instances; ++inst) {
    const Index n = 4 + static_cast<Index>(rng.bounded(9));  // 4..12
    const Index k = 1 + static_cast<Index>(rng.bounded(static_cast<std::uint64_t>(n)));
    Vector z(n);
    for (Index i = 0; i < n; ++i) z[i] = rng.normal();
    const Vector proj = project_sparse(z, k);
    const double got = (z - proj).norm();
    // Enumerate all k-subsets via bitmask; the distance to a support S sums
    // the squared entries outside S.
    double best_sq = std::numeric_limits<double>::infinity();
    for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
      if (std::popcount(mask) != static_cast<int>(k)) continue;
      double residual = 0.0;
      for (Index i = 0; i < n; ++i)
        if (!(mask & (1ull << i))) residual += z[i] * z[i];
      best_sq = std::min(best_sq, residual);
    }
    const double best = std::sqrt(best_sq);
    worst = std::max(worst, std::abs(got - best));
  }
  return {"hard-threshold-exhaustive-oracle", worst <= 1e-12,
          "max |dist - oracle dist| = " + format_double(worst) + " over " +
              std::to_string(instances) + " instances, want <= 1e-12"};
}

/// SVD truncation dominates random rank-r candidates in Frobenius error.
inline CheckResult check_svd_truncation_dominance(std::uint64_t seed, int instances = 20,
                                                  int candidates = 200) {
  Rng rng(seed);
  bool ok = true;
  double worst_gap = 0.0;
  for (int inst = 0; inst < instances; ++inst) {
    const Index n1 = 2 + static_cast<Index>(rng.bounded(7));  // 2..8
    const Index n2 = 2 + static_cast<Index>(rng.bounded(7));
    const Index r = 1 + static_cast<Index>(rng.bounded(static_cast<std::uint64_t>(std::min(n1, n2))));
    Matrix z(n1, n2);
    for (Index i = 0; i < n1; ++i)
      for (Index j = 0; j < n2; ++j) z(i, j) = rng.normal();
    const double got = (z - project_lowrank_matrix(z, r)).norm();
    for (int c = 0; c < candidates; ++c) {
      Matrix b(n1, r), ct(r, n2);
      for (Index i = 0; i < n1; ++i)
        for (Index j = 0; j < r; ++j) b(i, j) = rng.normal();
      for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < n2; ++j) ct(i, j) = rng.normal();
      const double cand = (z - b * ct).norm();
      worst_gap = std::max(worst_gap, got - cand);
      ok = ok && got <= cand + 1e-12;
    }
  }
  return {"svd-truncation-dominance", ok,
          "max (truncation error - candidate error) = " + format_double(worst_gap) +
              ", want <= 0"};
}

/// Factor-two bound of hard-thresholded back projection,
/// ||x - xhat|| <= 2 ||x - a_T||, plus projector optimality, on fresh random
/// quantized instances. Both hold deterministically: xhat is the best k-term
/// approximation of a_T, and x is itself k-sparse and supported on T.
inline CheckResult check_pbp_triangle_bound(std::uint64_t seed, int instances = 50) {
  Rng rng(seed);
  bool ok = true;
  double worst_ratio = 0.0;
  for (int inst = 0; inst < instances; ++inst) {
    const Index n = 32, k = 3;
    const Index m = 8 + static_cast<Index>(rng.bounded(25));
    const double delta = std::exp(rng.uniform(std::log(0.25), std::log(4.0)));
    SensingOperator op = SensingOperator::gaussian(m, n, mix_seed(seed, 3 * inst));
    const Signal x = gen_sparse({n, k}, mix_seed(seed, 3 * inst + 1));
    QuantizedMap map(std::move(op), delta, DitherMode::Uniform, mix_seed(seed, 3 * inst + 2));
    const Vector y = map.observe(x.data);
    const Vector a = back_project(map.op(), y);
    const Signal xhat = project(SignalModel{SparseModel{n, k}}, a);
    Vector a_t = Vector::Zero(n);
    for (Index i = 0; i < n; ++i)
      if (x.data[i] != 0.0 || xhat.data[i] != 0.0) a_t[i] = a[i];
    const double lhs = (x.data - xhat.data).norm();
    const double rhs = 2.0 * (x.data - a_t).norm();
    if (rhs > 0.0) worst_ratio = std::max(worst_ratio, lhs / rhs);
    ok = ok && lhs <= rhs + 1e-10;
    ok = ok && (xhat.data - a).norm() <= (x.data - a).norm() + 1e-10;
  }
  return {"pbp-triangle-bound", ok,
          "max ||x - xhat|| / (2 ||x - a_T||) = " + format_double(worst_ratio) + " over " +
              std::to_string(instances) + " instances, want <= 1"};
}

/// Reconstruction error bound 4 eps + 2 nu with sampled distortion constants,
/// where the samples include the directions the error bound is attained on.
inline CheckResult check_error_bound_with_estimates(std::uint64_t seed, int instances = 5) {
  bool ok = true;
  double worst_margin = 1e300;
  for (int inst = 0; inst < instances; ++inst) {
    const Index n = 64, k = 3, m = 48;
    const double delta = 1.0;
    const SignalModel model{SparseModel{n, k}};
    SensingOperator op = SensingOperator::gaussian(m, n, mix_seed(seed, 4 * inst));
    const Signal x = generate(model, mix_seed(seed, 4 * inst + 1));
    QuantizedMap map(std::move(op), delta, DitherMode::Uniform, mix_seed(seed, 4 * inst + 2));
    const Vector y = map.observe(x.data);
    const Vector a = back_project(map.op(), y);
    const Signal xhat = project(model, a);
    const double err = (x.data - xhat.data).norm();

    Vector a_t = Vector::Zero(n);
    for (Index i = 0; i < n; ++i)
      if (x.data[i] != 0.0 || xhat.data[i] != 0.0) a_t[i] = a[i];
    Vector w = x.data - a_t;
    const double wn = w.norm();
    std::vector<Vector> extra;
    Vector w_unit;
    if (wn > 0.0) {
      w_unit = w / wn;
      extra.push_back(w_unit + x.data);
      extra.push_back(w_unit - x.data);
    }
    const DistortionEstimate eps =
        empirical_rip(map.op(), model, 64, mix_seed(seed, 4 * inst + 3), extra);
    const DistortionEstimate nu = empirical_local_lpd(map, x, model, 16, mix_seed(seed, 4 * inst + 3),
                                                      wn > 0.0 ? &w_unit : nullptr);
    const double bound = 4.0 * eps.value + 2.0 * nu.value;
    worst_margin = std::min(worst_margin, bound - err);
    ok = ok && err <= bound + 1e-10;
  }
  return {"error-bound-from-sampled-distortions", ok,
          "min (4 eps + 2 nu - error) = " + format_double(worst_margin) + ", want >= 0"};
}

/// Generators produce unit-norm signals in the model set.
inline CheckResult check_generators(std::uint64_t seed) {
  double worst = 0.0;
  for (int rep = 0; rep < 25; ++rep) {
    const Signal xs = gen_sparse({64, 5}, mix_seed(seed, rep));
    int nnz = 0;
    for (Index i = 0; i < xs.data.size(); ++i) nnz += xs.data[i] != 0.0;
    worst = std::max(worst, std::abs(xs.data.norm() - 1.0));
    if (nnz != 5) worst = std::max(worst, 1.0);
    const Signal xl = gen_lowrank({12, 9, 2}, mix_seed(seed, 100 + rep));
    worst = std::max(worst, std::abs(xl.data.norm() - 1.0));
  }
  return {"generator-unit-norm", worst <= 1e-12,
          "max |norm - 1| = " + format_double(worst) + ", want <= 1e-12"};
}

/// Runs the full deterministic property suite.
inline PropertyReport run_property_suite(std::uint64_t seed = 1) {
  const ScalarQuantizer q = [](double t, double d) { return quantize_scalar(t, d); };
  PropertyReport report;
  report.checks.push_back(check_quantizer_bracket(q, mix_seed(seed, 11)));
  report.checks.push_back(check_unbiasedness_closed_form(20, mix_seed(seed, 12)));
  report.checks.push_back(check_unbiasedness_monte_carlo(q, mix_seed(seed, 13), 5, 1000000));
  report.checks.push_back(check_dither_and_lattice(mix_seed(seed, 14)));
  report.checks.push_back(check_adjoint_identity(mix_seed(seed, 15)));
  report.checks.push_back(check_partial_dct_isometry(mix_seed(seed, 16)));
  report.checks.push_back(check_hard_threshold_oracle(mix_seed(seed, 17)));
  report.checks.push_back(check_svd_truncation_dominance(mix_seed(seed, 18)));
  report.checks.push_back(check_pbp_triangle_bound(mix_seed(seed, 19)));
  report.checks.push_back(check_error_bound_with_estimates(mix_seed(seed, 20)));
  report.checks.push_back(check_generators(mix_seed(seed, 21)));
  return report;
}

}  // namespace qcs
