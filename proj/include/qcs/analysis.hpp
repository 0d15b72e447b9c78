#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "qcs/common.hpp"
#include "qcs/models.hpp"
#include "qcs/pbp.hpp"
#include "qcs/quantize.hpp"
#include "qcs/rng.hpp"
#include "qcs/sensing.hpp"

namespace qcs {

enum class DistortionKind { Rip, Lpd, LocalLpd };

/// A sampled supremum of a distortion functional. By construction the value
/// is a lower bound of the true supremum, and it is nondecreasing when the
/// sample set grows (per-sample seeds derive from (seed, sample index)).
struct DistortionEstimate {
  double value = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
  DistortionKind kind = DistortionKind::Rip;
};

namespace detail {

inline double rip_distortion(const SensingOperator& op, const Vector& u) {
  const double quad = op.apply(u).squaredNorm() / static_cast<double>(op.rows());
  return std::abs(quad - u.squaredNorm());
}

inline double lpd_distortion(const QuantizedMap& map, const Vector& u, const Vector& v) {
  const Vector phi_v = map.op().apply(v);
  const double lhs = map.observe(u).dot(phi_v);
  const double rhs = map.observe_linear(u).dot(phi_v);
  return std::abs(lhs - rhs) / static_cast<double>(map.op().rows());
}

}  // namespace detail

/// Sampled RIP distortion sup |(1/m)||Phi u||^2 - ||u||^2| over unit-norm
/// elements of the model's difference set. Sample i uses the pair seeds
/// mix_seed(seed, 2i) and mix_seed(seed, 2i + 1); both the normalized
/// difference and the first generator output enter the sample. Extra
/// directions, when given, are evaluated as-is after unit normalization.
inline DistortionEstimate empirical_rip(const SensingOperator& op, const SignalModel& model,
                                        int samples, std::uint64_t seed,
                                        std::span<const Vector> extra_directions = {}) {
  detail::require(samples >= 1, "empirical_rip: samples must be positive");
  detail::require(ambient_dim(model) == op.cols(),
                  "empirical_rip: model ambient dimension does not match the operator");
  double value = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Signal a = generate(model, mix_seed(seed, 2 * static_cast<std::uint64_t>(i)));
    const Signal b = generate(model, mix_seed(seed, 2 * static_cast<std::uint64_t>(i) + 1));
    Vector diff = a.data - b.data;
    const double norm = diff.norm();
    if (norm > 0.0) {
      diff /= norm;
      value = std::max(value, detail::rip_distortion(op, diff));
    }
    value = std::max(value, detail::rip_distortion(op, a.data));
  }
  for (const Vector& dir : extra_directions) {
    const double norm = dir.norm();
    if (norm == 0.0) continue;
    value = std::max(value, detail::rip_distortion(op, dir / norm));
  }
  return DistortionEstimate{value, samples, seed, DistortionKind::Rip};
}

/// Sampled LPD distortion sup (1/m)|<A(u), Phi v> - <Phi u, Phi v>| over
/// ordered pairs of unit-norm model signals, with the map's fixed dither.
/// Pair i uses seeds mix_seed(seed, 2i) and mix_seed(seed, 2i + 1).
inline DistortionEstimate empirical_lpd(const QuantizedMap& map, const SignalModel& model,
                                        int pairs, std::uint64_t seed) {
  detail::require(pairs >= 1, "empirical_lpd: pairs must be positive");
  detail::require(ambient_dim(model) == map.op().cols(),
                  "empirical_lpd: model ambient dimension does not match the operator");
  double value = 0.0;
  for (int i = 0; i < pairs; ++i) {
    const Signal u = generate(model, mix_seed(seed, 2 * static_cast<std::uint64_t>(i)));
    const Signal v = generate(model, mix_seed(seed, 2 * static_cast<std::uint64_t>(i) + 1));
    value = std::max(value, detail::lpd_distortion(map, u.data, v.data));
  }
  return DistortionEstimate{value, pairs, seed, DistortionKind::Lpd};
}

/// LPD distortion with u held fixed. The direction set always contains
/// v = u, then `directions` sampled signals (direction i uses seed
/// mix_seed(seed, i)), then the optional caller-provided direction.
inline DistortionEstimate empirical_local_lpd(const QuantizedMap& map, const Signal& u,
                                              const SignalModel& model, int directions,
                                              std::uint64_t seed,
                                              const Vector* extra_direction = nullptr) {
  detail::require(directions >= 1, "empirical_local_lpd: directions must be positive");
  detail::require(u.data.size() == map.op().cols(),
                  "empirical_local_lpd: signal length does not match the operator");
  detail::require(u.data.norm() <= 1.0 + 1e-12, "empirical_local_lpd: need ||u|| <= 1");
  double value = detail::lpd_distortion(map, u.data, u.data);
  int count = 1;
  for (int i = 0; i < directions; ++i) {
    const Signal v = generate(model, mix_seed(seed, static_cast<std::uint64_t>(i)));
    value = std::max(value, detail::lpd_distortion(map, u.data, v.data));
    ++count;
  }
  if (extra_direction != nullptr && extra_direction->norm() > 0.0) {
    value = std::max(value, detail::lpd_distortion(map, u.data, *extra_direction));
    ++count;
  }
  return DistortionEstimate{value, count, seed, DistortionKind::LocalLpd};
}

struct DecayFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of log-space fit residuals
};

/// Ordinary least squares of log(error) against log(m).
inline DecayFit fit_decay_exponent(std::span<const double> ms, std::span<const double> errors) {
  detail::require(ms.size() == errors.size() && ms.size() >= 2,
                  "fit_decay_exponent: need two or more (m, error) pairs of equal length");
  const std::size_t count = ms.size();
  double sx = 0.0, sy = 0.0;
  std::vector<double> lx(count), ly(count);
  for (std::size_t i = 0; i < count; ++i) {
    detail::require(ms[i] > 0.0 && errors[i] > 0.0,
                    "fit_decay_exponent: all m and error values must be strictly positive");
    lx[i] = std::log(ms[i]);
    ly[i] = std::log(errors[i]);
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = sx / static_cast<double>(count);
  const double my = sy / static_cast<double>(count);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  detail::require(sxx > 0.0, "fit_decay_exponent: degenerate fit, all m values are equal");
  DecayFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double r = ly[i] - (fit.intercept + fit.exponent * lx[i]);
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / static_cast<double>(count));
  return fit;
}

/// One reconstruction trial's full provenance.
struct TrialRecord {
  std::string experiment;  // experiment identifier token
  std::string matrix;      // gaussian | partial-dct | bernoulli
  std::string model;       // sparse | lowrank
  Index n = 0;             // ambient dimension
  Index k_or_r = 0;
  Index m = 0;
  double delta = 0.0;
  bool dither = false;
  int trial = 0;
  std::uint64_t seed = 0;  // derived trial seed
  double error = 0.0;
};

struct PointStats {
  Index m = 0;
  double delta = 0.0;
  bool dither = false;
  double mean = 0.0;
  double median = 0.0;
  double stddev = 0.0;  // sample convention (divide by count - 1); 0 for a single trial
  int count = 0;
  bool in_fit_range = true;
};

struct SeriesFit {
  double delta = 0.0;
  bool dither = false;
  DecayFit fit;
  int points_used = 0;
};

/// Aggregated statistics over a parameter grid. Points are sorted by
/// (delta, dither, m); fits are per (delta, dither) series over the
/// in-fit-range per-point mean errors.
struct SweepResult {
  std::vector<PointStats> points;
  std::vector<SeriesFit> fits;
};

/// Groups records by (m, delta, dither) and attaches per-series decay fits
/// over points with m >= fit_min_m (all points when unset). Deterministic and
/// permutation-invariant: records are reduced in a canonical sorted order.
inline SweepResult aggregate_trials(std::span<const TrialRecord> records,
                                    std::optional<double> fit_min_m = std::nullopt) {
  detail::require(!records.empty(), "aggregate_trials: no records");
  using SeriesKey = std::pair<double, bool>;
  std::map<SeriesKey, std::map<Index, std::vector<const TrialRecord*>>> groups;
  for (const TrialRecord& rec : records)
    groups[{rec.delta, rec.dither}][rec.m].push_back(&rec);

  SweepResult out;
  for (auto& [key, by_m] : groups) {
    for (auto& [m, recs] : by_m) {
      // Canonical reduction order, independent of input permutation.
      std::sort(recs.begin(), recs.end(),
                [](const TrialRecord* a, const TrialRecord* b) { return a->trial < b->trial; });
      std::vector<double> errs;
      errs.reserve(recs.size());
      double sum = 0.0;
      for (const TrialRecord* r : recs) {
        errs.push_back(r->error);
        sum += r->error;
      }
      PointStats p;
      p.m = m;
      p.delta = key.first;
      p.dither = key.second;
      p.count = static_cast<int>(errs.size());
      p.mean = sum / static_cast<double>(errs.size());
      std::vector<double> sorted = errs;
      std::sort(sorted.begin(), sorted.end());
      const std::size_t half = sorted.size() / 2;
      p.median = (sorted.size() % 2 == 1) ? sorted[half]
                                          : 0.5 * (sorted[half - 1] + sorted[half]);
      if (errs.size() > 1) {
        double ss = 0.0;
        for (double e : errs) ss += (e - p.mean) * (e - p.mean);
        p.stddev = std::sqrt(ss / static_cast<double>(errs.size() - 1));
      }
      p.in_fit_range = !fit_min_m || static_cast<double>(m) >= *fit_min_m;
      out.points.push_back(p);
    }
    std::vector<double> ms, means;
    for (const PointStats& p : out.points) {
      if (p.delta == key.first && p.dither == key.second && p.in_fit_range && p.mean > 0.0) {
        ms.push_back(static_cast<double>(p.m));
        means.push_back(p.mean);
      }
    }
    const std::size_t distinct =
        std::set<double>(ms.begin(), ms.end()).size();
    if (distinct >= 2) {
      SeriesFit sf;
      sf.delta = key.first;
      sf.dither = key.second;
      sf.fit = fit_decay_exponent(ms, means);
      sf.points_used = static_cast<int>(ms.size());
      out.fits.push_back(sf);
    }
  }
  return out;
}

}  // namespace qcs
