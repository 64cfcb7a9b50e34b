#pragma once

// Procedural hand-gesture captures for demos, fixtures and tests. Each class
// has its own flexion profile, finger spread and palm trajectory; subjects vary
// bone lengths, repetitions vary speed, duration and sensor noise.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hgr/dataset.hpp"
#include "hgr/rng.hpp"
#include "hgr/skeleton.hpp"

namespace hgr {

struct HandPose {
  Vec3 palm = Vec3::Zero();
  std::array<double, 5> azimuth{};               // finger direction in the palm plane, rad from +y
  std::array<std::array<double, 3>, 5> flex{};   // flexion at A, B, C, rad
  double bone_scale = 1.0;
};

inline HandFrame pose_to_frame(const HandPose& pose, double timestamp) {
  static const std::array<Vec3, 5> base = {Vec3(-35, -10, 0), Vec3(-20, 40, 0), Vec3(0, 45, 0),
                                           Vec3(18, 42, 0), Vec3(34, 35, 0)};
  static const std::array<std::array<double, 3>, 5> len = {{{35, 30, 25},
                                                            {40, 25, 20},
                                                            {45, 28, 22},
                                                            {42, 26, 20},
                                                            {32, 20, 18}}};
  HandFrame f;
  f.timestamp = timestamp;
  f.set(HandPointId::palm(), pose.palm);
  for (std::size_t j = 0; j < 5; ++j) {
    const auto finger = static_cast<Finger>(j);
    Vec3 p = pose.palm + base[j] * pose.bone_scale;
    f.set(HandPointId::of(finger, Joint::A), p);
    double elevation = 0.0;
    const double az = pose.azimuth[j];
    for (std::size_t k = 0; k < 3; ++k) {
      elevation += pose.flex[j][k];
      const Vec3 dir(std::sin(az) * std::cos(elevation), std::cos(az) * std::cos(elevation),
                     -std::sin(elevation));
      p += dir * len[j][k] * pose.bone_scale;
      f.set(HandPointId::of(finger, static_cast<Joint>(k + 1)), p);
    }
  }
  return f;
}

struct SyntheticSpec {
  int classes = 4;
  int subjects = 6;
  int repetitions = 2;
  int min_frames = 60;
  int max_frames = 120;
  double frame_rate = 100.0;
  double noise_mm = 0.3;
  std::uint64_t seed = 1;
};

namespace detail {
struct ClassProfile {
  std::array<std::array<double, 3>, 5> flex_start;
  std::array<std::array<double, 3>, 5> flex_end;
  std::array<double, 5> azimuth;
  Vec3 palm_path;
  double wiggle;
};

inline ClassProfile class_profile(std::uint64_t seed, int cls) {
  Rng rng(mix_seed(seed, 1000 + static_cast<std::uint64_t>(cls)));
  ClassProfile p;
  const std::array<double, 5> az0 = {-1.0, -0.25, 0.0, 0.2, 0.4};
  for (std::size_t j = 0; j < 5; ++j) {
    p.azimuth[j] = az0[j] + rng.uniform(-0.12, 0.12);
    for (std::size_t k = 0; k < 3; ++k) {
      p.flex_start[j][k] = rng.uniform(0.05, 1.2);
      p.flex_end[j][k] = rng.uniform(0.05, 1.2);
    }
  }
  p.palm_path = Vec3(rng.uniform(-60, 60), rng.uniform(-60, 60), rng.uniform(-60, 60));
  p.wiggle = rng.uniform(0.0, 0.4);
  return p;
}
}  // namespace detail

inline NativeCapture synthetic_capture(const SyntheticSpec& spec, int cls, int subject, int rep) {
  const detail::ClassProfile prof = detail::class_profile(spec.seed, cls);
  Rng rng(mix_seed(spec.seed, (static_cast<std::uint64_t>(cls) << 40) ^
                                  (static_cast<std::uint64_t>(subject) << 20) ^
                                  static_cast<std::uint64_t>(rep)));
  Rng subject_rng(mix_seed(spec.seed, 77777 + static_cast<std::uint64_t>(subject)));
  const double bone_scale = subject_rng.uniform(0.9, 1.1);
  const int frames = spec.min_frames + static_cast<int>(rng.uniform_index(
                                           static_cast<std::size_t>(spec.max_frames - spec.min_frames + 1)));
  const double phase = rng.uniform(0.0, 6.283185307179586);
  const Vec3 start(rng.uniform(-20, 20), rng.uniform(150, 250), rng.uniform(-20, 20));

  NativeCapture cap;
  cap.subject = "s" + std::to_string(100 + subject).substr(1);
  cap.label = "c" + std::to_string(cls);
  cap.frame_rate = spec.frame_rate;
  for (int t = 0; t < frames; ++t) {
    const double u = frames > 1 ? static_cast<double>(t) / (frames - 1) : 0.0;
    const double s = 0.5 - 0.5 * std::cos(3.141592653589793 * u);  // ease in/out
    HandPose pose;
    pose.bone_scale = bone_scale;
    pose.palm = start + prof.palm_path * s;
    for (std::size_t j = 0; j < 5; ++j) {
      pose.azimuth[j] = prof.azimuth[j];
      for (std::size_t k = 0; k < 3; ++k) {
        pose.flex[j][k] = prof.flex_start[j][k] + (prof.flex_end[j][k] - prof.flex_start[j][k]) * s +
                          prof.wiggle * 0.25 * std::sin(phase + 9.0 * u + static_cast<double>(j));
      }
    }
    HandFrame f = pose_to_frame(pose, t / spec.frame_rate);
    for (auto& p : f.points) {
      *p += Vec3(rng.normal(), rng.normal(), rng.normal()) * spec.noise_mm;
    }
    cap.sequence.frames.push_back(std::move(f));
  }
  cap.sequence.duration = frames / spec.frame_rate;
  return cap;
}

/// Generator parameters as a manifest tag, so prepared-set cache keys differ
/// whenever the generated data would.
inline std::string synthetic_tag(const SyntheticSpec& spec) {
  return "synthetic seed=" + std::to_string(spec.seed) + " frames=" + std::to_string(spec.min_frames) + "-" +
         std::to_string(spec.max_frames) + " rate=" + detail::format_double(spec.frame_rate) +
         " noise=" + detail::format_double(spec.noise_mm);
}

/// In-memory dataset of classes x subjects x repetitions captures.
inline RawDataset make_synthetic_dataset(const SyntheticSpec& spec) {
  RawDataset ds;
  for (int c = 0; c < spec.classes; ++c) ds.manifest.label_names.push_back("c" + std::to_string(c));
  for (int c = 0; c < spec.classes; ++c) {
    for (int s = 0; s < spec.subjects; ++s) {
      for (int r = 0; r < spec.repetitions; ++r) {
        NativeCapture cap = synthetic_capture(spec, c, s, r);
        ds.manifest.entries.push_back({"synthetic/" + cap.label + "/" + cap.subject + "_r" + std::to_string(r),
                                       cap.label, cap.subject, {synthetic_tag(spec)}, Split::Unassigned});
        ds.sequences.push_back(std::move(cap.sequence));
      }
    }
  }
  return ds;
}

}  // namespace hgr
