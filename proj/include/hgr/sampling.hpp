#pragma once

// Adaptive temporal sampling: every scalar feature track is smoothed, its
// relative extrema mark candidate instants, and exactly T instants are kept.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "hgr/error.hpp"
#include "hgr/features.hpp"
#include "hgr/rng.hpp"
#include "hgr/savitzky_golay.hpp"

namespace hgr {

/// Track ids in the fixed order omega0..4, beta0..4, gamma1..3, phi.
/// This order is also the tie-break order for quota rounding.
inline constexpr std::size_t kTrackCount = 14;
inline constexpr std::size_t kPhiTrack = 13;

inline std::string track_name(std::size_t id) {
  if (id < 5) return "omega" + std::to_string(id);
  if (id < 10) return "beta" + std::to_string(id - 5);
  if (id < 13) return "gamma" + std::to_string(id - 9);
  return "phi";
}

struct FeatureTrack {
  std::size_t id = 0;
  std::vector<double> values;
};

/// The 14 sampling tracks of a feature sequence. phi is the Euclidean norm of
/// the palm displacement.
inline std::vector<FeatureTrack> tracks_from_features(std::span<const FeatureVector> features) {
  std::vector<FeatureTrack> tracks(kTrackCount);
  for (std::size_t g = 0; g < kTrackCount; ++g) {
    tracks[g].id = g;
    tracks[g].values.reserve(features.size());
  }
  for (const FeatureVector& f : features) {
    for (std::size_t j = 0; j < 5; ++j) {
      tracks[j].values.push_back(f.omega[j]);
      tracks[5 + j].values.push_back(f.beta[j]);
    }
    for (std::size_t j = 0; j < 3; ++j) tracks[10 + j].values.push_back(f.gamma[j]);
    tracks[kPhiTrack].values.push_back(f.palm_disp.norm());
  }
  return tracks;
}

struct SamplingParams {
  int sg_window = 9;
  int sg_order = 3;
};

inline FeatureTrack smooth(const FeatureTrack& track, int window, int order) {
  return {track.id, savgol_smooth(track.values, window, order)};
}

/// Interior strict relative maxima and minima. A plateau bounded on both sides
/// by lower (or both by higher) values contributes its midpoint, rounded down.
inline std::vector<std::size_t> find_extrema(std::span<const double> v) {
  std::vector<std::size_t> out;
  const std::size_t n = v.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    std::size_t j = i;
    while (j + 1 < n && v[j + 1] == v[i]) ++j;
    if (j + 1 >= n) break;  // run reaches the last sample
    const double left = v[i - 1];
    const double right = v[j + 1];
    const bool is_max = left < v[i] && right < v[i];
    const bool is_min = left > v[i] && right > v[i];
    if (is_max || is_min) out.push_back(i + (j - i) / 2);
    i = j + 1;
  }
  return out;
}

inline std::vector<std::size_t> find_extrema(const FeatureTrack& track) {
  return find_extrema(track.values);
}

struct SamplePlan {
  std::size_t raw_length = 0;
  std::size_t target_length = 0;
  std::vector<std::size_t> theta_star;               // sorted, unique
  std::vector<std::vector<std::size_t>> theta_g;     // per track, sorted
  std::vector<std::size_t> quotas;                   // per track; empty unless over-full
  std::vector<std::size_t> selected;                 // exactly target_length entries

  friend bool operator==(const SamplePlan&, const SamplePlan&) = default;
};

/// Largest-remainder apportionment of `total` proportional to `weights`.
/// Ties in the remainder go to the lower index.
inline std::vector<std::size_t> largest_remainder(std::span<const std::size_t> weights,
                                                  std::size_t total) {
  const std::size_t sum = std::accumulate(weights.begin(), weights.end(), std::size_t{0});
  std::vector<std::size_t> quota(weights.size(), 0);
  if (sum == 0) return quota;
  std::vector<std::size_t> rem(weights.size());
  std::size_t assigned = 0;
  for (std::size_t g = 0; g < weights.size(); ++g) {
    const std::uint64_t scaled = static_cast<std::uint64_t>(total) * weights[g];
    quota[g] = static_cast<std::size_t>(scaled / sum);
    rem[g] = static_cast<std::size_t>(scaled % sum);
    assigned += quota[g];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++quota[order[k % order.size()]];
  return quota;
}

/// Smoothing parameters adapted to a track of length n: the window shrinks to
/// the largest odd count <= n and the order to window - 1. Returns window 0
/// when the track has no interior instant (n < 3).
inline SamplingParams effective_params(const SamplingParams& p, std::size_t n) {
  if (n < 3) return {0, 0};
  SamplingParams e = p;
  if (static_cast<std::size_t>(e.sg_window) > n) {
    e.sg_window = static_cast<int>(n % 2 == 1 ? n : n - 1);
  }
  e.sg_order = std::min(e.sg_order, e.sg_window - 1);
  return e;
}

inline SamplePlan build_plan(std::span<const FeatureTrack> tracks, std::size_t target_length,
                             std::uint64_t seed, const SamplingParams& params = {}) {
  if (tracks.empty() || tracks.front().values.empty()) {
    throw Error(ErrorKind::EmptySequence, "no samples to plan over");
  }
  if (target_length == 0) throw Error(ErrorKind::BadConfig, "target length must be >= 1");
  const std::size_t n = tracks.front().values.size();
  for (const auto& tr : tracks) {
    if (tr.values.size() != n) throw Error(ErrorKind::PlanMismatch, "tracks differ in length");
  }
  // Validates the configured parameters even when the track is short.
  if (params.sg_window % 2 == 0 || params.sg_window <= params.sg_order || params.sg_order < 0) {
    throw Error(ErrorKind::BadFilterParams, "window=" + std::to_string(params.sg_window) +
                                                " order=" + std::to_string(params.sg_order));
  }

  SamplePlan plan;
  plan.raw_length = n;
  plan.target_length = target_length;

  const SamplingParams eff = effective_params(params, n);
  std::set<std::size_t> star;
  plan.theta_g.reserve(tracks.size());
  for (const auto& tr : tracks) {
    std::vector<std::size_t> ext;
    if (eff.sg_window > 0) ext = find_extrema(smooth(tr, eff.sg_window, eff.sg_order));
    star.insert(ext.begin(), ext.end());
    plan.theta_g.push_back(std::move(ext));
  }
  plan.theta_star.assign(star.begin(), star.end());

  Rng rng(seed);
  std::set<std::size_t> chosen;
  if (plan.theta_star.size() == target_length) {
    chosen = star;
  } else if (plan.theta_star.size() < target_length) {
    chosen = star;
    std::vector<std::size_t> rest;
    for (std::size_t t = 0; t < n; ++t) {
      if (!star.contains(t)) rest.push_back(t);
    }
    const auto drawn = rng.sample_without_replacement(rest, target_length - star.size());
    chosen.insert(drawn.begin(), drawn.end());
  } else {
    std::vector<std::size_t> sizes;
    for (const auto& g : plan.theta_g) sizes.push_back(g.size());
    plan.quotas = largest_remainder(sizes, target_length);
    for (std::size_t g = 0; g < plan.theta_g.size(); ++g) {
      const auto drawn = rng.sample_without_replacement(plan.theta_g[g], plan.quotas[g]);
      chosen.insert(drawn.begin(), drawn.end());
    }
    if (chosen.size() < target_length) {
      std::vector<std::size_t> rest;
      for (std::size_t t : plan.theta_star) {
        if (!chosen.contains(t)) rest.push_back(t);
      }
      const auto drawn = rng.sample_without_replacement(rest, target_length - chosen.size());
      chosen.insert(drawn.begin(), drawn.end());
    }
  }
  plan.selected.assign(chosen.begin(), chosen.end());
  // Shorter than T: repeat the final instant.
  while (plan.selected.size() < target_length) plan.selected.push_back(n - 1);
  return plan;
}

/// Fixed-length gesture sequence; column t of `x` is the feature vector x_t.
struct GestureSequence {
  Eigen::MatrixXd x;  // kFeatureDim x T

  std::size_t length() const { return static_cast<std::size_t>(x.cols()); }
  friend bool operator==(const GestureSequence& a, const GestureSequence& b) {
    return a.x.rows() == b.x.rows() && a.x.cols() == b.x.cols() && a.x == b.x;
  }
};

inline GestureSequence to_sequence(std::span<const FeatureVector> features) {
  GestureSequence s;
  s.x.resize(static_cast<Eigen::Index>(kFeatureDim), static_cast<Eigen::Index>(features.size()));
  for (std::size_t t = 0; t < features.size(); ++t) {
    s.x.col(static_cast<Eigen::Index>(t)) = features[t].flatten();
  }
  return s;
}

/// Index gather of the planned instants, in temporal order.
inline GestureSequence apply_plan(std::span<const FeatureVector> features, const SamplePlan& plan) {
  if (features.size() != plan.raw_length) {
    throw Error(ErrorKind::PlanMismatch, "plan built for " + std::to_string(plan.raw_length) +
                                             " instants, got " + std::to_string(features.size()));
  }
  std::vector<FeatureVector> picked;
  picked.reserve(plan.selected.size());
  for (std::size_t t : plan.selected) picked.push_back(features[t]);
  return to_sequence(picked);
}

/// Tracks, plan and gather in one call.
inline GestureSequence sample_sequence(std::span<const FeatureVector> features,
                                       std::size_t target_length, std::uint64_t seed,
                                       const SamplingParams& params = {}) {
  const auto tracks = tracks_from_features(features);
  return apply_plan(features, build_plan(tracks, target_length, seed, params));
}

}  // namespace hgr
