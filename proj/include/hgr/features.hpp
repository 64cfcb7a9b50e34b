#pragma once

// Per-instant feature vector: joint angles, fingertip and palm displacements,
// and angles between adjacent fingers.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "hgr/error.hpp"
#include "hgr/skeleton.hpp"

namespace hgr {

inline constexpr std::size_t kFeatureDim = 31;

/// Flat layout: [omega0..4, beta0..4, (u,v,z) x 5 tips, (u,v,z) palm, gamma1..3].
namespace feature_index {
inline constexpr std::size_t kOmega = 0;
inline constexpr std::size_t kBeta = 5;
inline constexpr std::size_t kTipDisp = 10;
inline constexpr std::size_t kPalmDisp = 25;
inline constexpr std::size_t kGamma = 28;
}  // namespace feature_index

using FlatFeatures = Eigen::Matrix<double, static_cast<int>(kFeatureDim), 1>;

struct FeatureVector {
  std::array<double, 5> omega{};
  std::array<double, 5> beta{};
  std::array<Vec3, 5> tip_disp{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero(),
                               Vec3::Zero()};
  Vec3 palm_disp = Vec3::Zero();
  std::array<double, 3> gamma{};

  FlatFeatures flatten() const {
    using namespace feature_index;
    FlatFeatures x;
    for (std::size_t j = 0; j < 5; ++j) {
      x[kOmega + j] = omega[j];
      x[kBeta + j] = beta[j];
      x.segment<3>(kTipDisp + 3 * j) = tip_disp[j];
    }
    x.segment<3>(kPalmDisp) = palm_disp;
    for (std::size_t j = 0; j < 3; ++j) x[kGamma + j] = gamma[j];
    return x;
  }

  static FeatureVector unflatten(const FlatFeatures& x) {
    using namespace feature_index;
    FeatureVector f;
    for (std::size_t j = 0; j < 5; ++j) {
      f.omega[j] = x[kOmega + j];
      f.beta[j] = x[kBeta + j];
      f.tip_disp[j] = x.segment<3>(kTipDisp + 3 * j);
    }
    f.palm_disp = x.segment<3>(kPalmDisp);
    for (std::size_t j = 0; j < 3; ++j) f.gamma[j] = x[kGamma + j];
    return f;
  }

  friend bool operator==(const FeatureVector& a, const FeatureVector& b) {
    return a.flatten() == b.flatten();
  }
};

/// Feature groups that can be switched off for ablation runs. Disabled groups
/// are zero-filled so the vector length stays 31.
struct FeatureMask {
  bool omega = true;
  bool beta = true;
  bool gamma = true;
  bool displacements = true;

  static FeatureMask all() { return {}; }

  bool any() const { return omega || beta || gamma || displacements; }

  /// Parses "omega+beta", "all", "disp", ... Throws BadConfig on unknown names
  /// or an empty selection.
  static FeatureMask parse(std::string_view text) {
    if (text == "all") return all();
    FeatureMask m{false, false, false, false};
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t end = std::min(text.find('+', pos), text.size());
      const std::string_view tok = text.substr(pos, end - pos);
      if (tok == "omega" || tok == "w") {
        m.omega = true;
      } else if (tok == "beta" || tok == "b") {
        m.beta = true;
      } else if (tok == "gamma" || tok == "g") {
        m.gamma = true;
      } else if (tok == "disp" || tok == "displacements" || tok == "d") {
        m.displacements = true;
      } else {
        throw Error(ErrorKind::BadConfig, "unknown feature group '" + std::string(tok) + "'");
      }
      pos = end + 1;
    }
    if (!m.any()) throw Error(ErrorKind::BadConfig, "feature mask selects nothing");
    return m;
  }

  std::string to_string() const {
    std::string s;
    auto add = [&](bool on, const char* name) {
      if (!on) return;
      if (!s.empty()) s += '+';
      s += name;
    };
    add(omega, "omega");
    add(beta, "beta");
    add(gamma, "gamma");
    add(displacements, "disp");
    return s;
  }

  friend bool operator==(const FeatureMask&, const FeatureMask&) = default;
};

inline FeatureVector apply_mask(FeatureVector f, const FeatureMask& mask) {
  if (!mask.omega) f.omega.fill(0.0);
  if (!mask.beta) f.beta.fill(0.0);
  if (!mask.gamma) f.gamma.fill(0.0);
  if (!mask.displacements) {
    for (auto& d : f.tip_disp) d.setZero();
    f.palm_disp.setZero();
  }
  return f;
}

/// arccos of the normalised dot product, clamped to [-1, 1].
inline double joint_angle(const Vec3& p, const Vec3& q) {
  const double np = p.norm();
  const double nq = q.norm();
  if (np < kEpsilonLen || nq < kEpsilonLen) {
    throw Error(ErrorKind::DegenerateBone, "zero-length vector in joint angle");
  }
  const double cosine = std::clamp(p.dot(q) / (np * nq), -1.0, 1.0);
  return std::acos(cosine);
}

struct FingerAngles {
  double omega;  // between BC and CD
  double beta;   // between AB and BC
};

inline FingerAngles finger_angles(const HandFrame& frame, Finger finger) {
  const BoneVectors b = bone_vectors(frame, finger);
  return {joint_angle(b.bc, b.cd), joint_angle(b.ab, b.bc)};
}

/// Angles between the base-to-tip directions (D - A) of index/middle,
/// middle/ring and ring/pinky.
inline std::array<double, 3> intra_finger_angles(const HandFrame& frame) {
  std::array<Vec3, 4> dir;
  for (std::size_t k = 0; k < 4; ++k) {
    const auto f = static_cast<Finger>(k + 1);
    dir[k] = frame.pos(f, Joint::D) - frame.pos(f, Joint::A);
    if (dir[k].norm() < kEpsilonLen) {
      throw Error(ErrorKind::DegenerateBone, finger_name(f) + " direction D-A");
    }
  }
  return {joint_angle(dir[0], dir[1]), joint_angle(dir[1], dir[2]), joint_angle(dir[2], dir[3])};
}

struct Displacements {
  std::array<Vec3, 5> tips;
  Vec3 palm;
};

/// curr - prev per point; all zero when there is no previous frame.
inline Displacements displacements(const HandFrame* prev, const HandFrame& curr) {
  Displacements out{{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()},
                    Vec3::Zero()};
  if (prev == nullptr) return out;
  for (std::size_t j = 0; j < 5; ++j) {
    const auto f = static_cast<Finger>(j);
    out.tips[j] = curr.pos(f, Joint::D) - prev->pos(f, Joint::D);
  }
  out.palm = curr.palm_center() - prev->palm_center();
  return out;
}

inline FeatureVector frame_features(const HandFrame* prev, const HandFrame& curr) {
  FeatureVector f;
  for (std::size_t j = 0; j < 5; ++j) {
    const FingerAngles a = finger_angles(curr, static_cast<Finger>(j));
    f.omega[j] = a.omega;
    f.beta[j] = a.beta;
  }
  const Displacements d = displacements(prev, curr);
  f.tip_disp = d.tips;
  f.palm_disp = d.palm;
  f.gamma = intra_finger_angles(curr);
  return f;
}

/// One feature vector per frame, in frame order.
inline std::vector<FeatureVector> extract_features(const RawSequence& seq,
                                                   const FeatureMask& mask = FeatureMask::all()) {
  validate_sequence(seq);
  std::vector<FeatureVector> out;
  out.reserve(seq.frames.size());
  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    const HandFrame* prev = t == 0 ? nullptr : &seq.frames[t - 1];
    try {
      out.push_back(apply_mask(frame_features(prev, seq.frames[t]), mask));
    } catch (const Error& e) {
      throw Error(e.kind(), e.detail() + " at frame " + std::to_string(t));
    }
  }
  return out;
}

}  // namespace hgr
