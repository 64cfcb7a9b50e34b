#pragma once

// Hand-skeleton data model: 5 fingers x 4 chain points plus the palm centre.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hgr/error.hpp"

namespace hgr {

using Vec3 = Eigen::Vector3d;

enum class Finger : int { Thumb = 0, Index = 1, Middle = 2, Ring = 3, Pinky = 4 };

/// Chain points from the proximal-most modelled point (A) to the fingertip (D).
/// Non-thumb fingers: AB proximal, BC intermediate, CD distal phalanx.
/// Thumb: AB metacarpal, BC proximal, CD distal phalanx.
enum class Joint : int { A = 0, B = 1, C = 2, D = 3 };

inline constexpr std::size_t kFingerCount = 5;
inline constexpr std::size_t kJointsPerFinger = 4;
inline constexpr std::size_t kPointCount = kFingerCount * kJointsPerFinger + 1;  // 21
inline constexpr double kEpsilonLen = 1e-6;  // mm

inline constexpr std::array<Finger, kFingerCount> kFingers = {
    Finger::Thumb, Finger::Index, Finger::Middle, Finger::Ring, Finger::Pinky};

/// A hand point: either one of the 20 finger chain points or the palm centre.
struct HandPointId {
  std::optional<Finger> finger;  // empty = palm centre
  Joint joint = Joint::A;

  static HandPointId palm() { return {}; }
  static HandPointId of(Finger f, Joint j) { return {f, j}; }

  /// Flat index in [0, 21): finger-major, joint-minor, palm last.
  std::size_t index() const {
    if (!finger) return kPointCount - 1;
    return static_cast<std::size_t>(*finger) * kJointsPerFinger + static_cast<std::size_t>(joint);
  }

  static HandPointId from_index(std::size_t i) {
    if (i + 1 == kPointCount) return palm();
    return of(static_cast<Finger>(i / kJointsPerFinger), static_cast<Joint>(i % kJointsPerFinger));
  }

  friend bool operator==(const HandPointId&, const HandPointId&) = default;
};

inline std::string finger_name(Finger f) {
  static const std::array<const char*, kFingerCount> names = {"thumb", "index", "middle", "ring",
                                                               "pinky"};
  return names[static_cast<std::size_t>(f)];
}

inline std::string to_string(const HandPointId& id) {
  if (!id.finger) return "palm";
  return finger_name(*id.finger) + "," + static_cast<char>('A' + static_cast<int>(id.joint));
}

/// Positions in millimetres. A point may be absent until validated.
struct HandFrame {
  std::array<std::optional<Vec3>, kPointCount> points{};
  double timestamp = 0.0;  // seconds from sequence start

  const std::optional<Vec3>& at(const HandPointId& id) const { return points[id.index()]; }
  std::optional<Vec3>& at(const HandPointId& id) { return points[id.index()]; }

  /// Unchecked access; only valid on a validated frame.
  const Vec3& pos(const HandPointId& id) const { return *points[id.index()]; }
  const Vec3& pos(Finger f, Joint j) const { return pos(HandPointId::of(f, j)); }
  const Vec3& palm_center() const { return pos(HandPointId::palm()); }

  void set(const HandPointId& id, const Vec3& p) { points[id.index()] = p; }
};

struct RawSequence {
  std::vector<HandFrame> frames;
  double duration = 0.0;  // seconds, the capture interval
};

/// Returns the frame unchanged when all 21 points are present and finite.
inline const HandFrame& validate_frame(const HandFrame& frame) {
  for (std::size_t i = 0; i < kPointCount; ++i) {
    const auto id = HandPointId::from_index(i);
    if (!frame.points[i]) throw Error(ErrorKind::MissingPoint, to_string(id));
    if (!frame.points[i]->allFinite()) throw Error(ErrorKind::NonFiniteCoordinate, to_string(id));
  }
  if (!std::isfinite(frame.timestamp)) throw Error(ErrorKind::NonFiniteCoordinate, "timestamp");
  return frame;
}

inline void validate_sequence(const RawSequence& seq) {
  if (seq.frames.empty()) throw Error(ErrorKind::EmptySequence, "raw sequence has no frames");
  if (!(seq.duration > 0.0)) throw Error(ErrorKind::EmptySequence, "non-positive duration");
  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    try {
      validate_frame(seq.frames[t]);
    } catch (const Error& e) {
      throw Error(e.kind(), e.detail() + " at frame " + std::to_string(t));
    }
    if (t > 0 && seq.frames[t].timestamp < seq.frames[t - 1].timestamp) {
      throw Error(ErrorKind::MalformedFrame,
                  "timestamp decreases at frame " + std::to_string(t));
    }
  }
}

struct BoneVectors {
  Vec3 ab;
  Vec3 bc;
  Vec3 cd;
};

inline BoneVectors bone_vectors(const HandFrame& frame, Finger finger) {
  const Vec3& a = frame.pos(finger, Joint::A);
  const Vec3& b = frame.pos(finger, Joint::B);
  const Vec3& c = frame.pos(finger, Joint::C);
  const Vec3& d = frame.pos(finger, Joint::D);
  BoneVectors out{b - a, c - b, d - c};
  const char* names[] = {"AB", "BC", "CD"};
  const Vec3* vs[] = {&out.ab, &out.bc, &out.cd};
  for (int k = 0; k < 3; ++k) {
    if (vs[k]->norm() < kEpsilonLen) {
      throw Error(ErrorKind::DegenerateBone, finger_name(finger) + " " + names[k]);
    }
  }
  return out;
}

}  // namespace hgr
