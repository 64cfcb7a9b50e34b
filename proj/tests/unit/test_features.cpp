#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

#include "hgr/features.hpp"
#include "hgr/synthetic.hpp"

using namespace hgr;
using std::numbers::pi;

namespace {

HandFrame pose_frame(std::uint64_t seed) {
  Rng rng(seed);
  HandPose pose;
  pose.palm = Vec3(rng.uniform(-50, 50), rng.uniform(100, 300), rng.uniform(-50, 50));
  pose.azimuth = {-1.0, -0.25, 0.0, 0.2, 0.4};
  for (auto& f : pose.flex)
    for (auto& a : f) a = rng.uniform(0.05, 1.2);
  return pose_to_frame(pose, 0.0);
}

/// All four long fingers pointing along their own direction from a common row.
HandFrame fan_frame(const std::array<Vec3, 4>& dirs) {
  HandFrame f = pose_frame(1);
  for (std::size_t k = 0; k < 4; ++k) {
    const auto finger = static_cast<Finger>(k + 1);
    const Vec3 a(10.0 * static_cast<double>(k), 0, 0);
    for (int j = 0; j < 4; ++j) f.set(HandPointId::of(finger, static_cast<Joint>(j)), a + dirs[k] * (10.0 * (j + 1)));
    f.set(HandPointId::of(finger, Joint::A), a);
  }
  return f;
}

RawSequence static_sequence(std::size_t n) {
  RawSequence s;
  for (std::size_t t = 0; t < n; ++t) {
    HandFrame f = pose_frame(3);
    f.timestamp = static_cast<double>(t) * 0.01;
    s.frames.push_back(f);
  }
  s.duration = static_cast<double>(n) * 0.01;
  return s;
}

}  // namespace

TEST(JointAngle, Examples) {
  EXPECT_DOUBLE_EQ(joint_angle({1, 0, 0}, {0, 1, 0}), pi / 2);
  EXPECT_EQ(joint_angle({1, 0, 0}, {1, 0, 0}), 0.0);
  EXPECT_NEAR(joint_angle({1, 0, 0}, {1, 1, 0}), pi / 4, 1e-15);
}

TEST(JointAngle, ClampAbsorbsRoundoff) {
  const Vec3 p(0.1, 0.2, 0.3);
  const double a = joint_angle(p, p * 3.0);
  EXPECT_FALSE(std::isnan(a));
  EXPECT_NEAR(a, 0.0, 1e-7);
  EXPECT_NEAR(joint_angle(p, -p), pi, 1e-7);
}

TEST(JointAngle, DegenerateInput) { EXPECT_THROW(joint_angle({0, 0, 0}, {1, 0, 0}), Error); }

TEST(FingerAngles, Examples) {
  HandFrame f = pose_frame(1);
  auto set = [&](const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    f.set(HandPointId::of(Finger::Middle, Joint::A), a);
    f.set(HandPointId::of(Finger::Middle, Joint::B), b);
    f.set(HandPointId::of(Finger::Middle, Joint::C), c);
    f.set(HandPointId::of(Finger::Middle, Joint::D), d);
    return finger_angles(f, Finger::Middle);
  };
  auto s = set({0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0});
  EXPECT_EQ(s.omega, 0.0);
  EXPECT_EQ(s.beta, 0.0);
  s = set({0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {2, 1, 0});
  EXPECT_DOUBLE_EQ(s.omega, pi / 2);
  EXPECT_EQ(s.beta, 0.0);
  s = set({0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0});
  EXPECT_DOUBLE_EQ(s.omega, pi / 2);
  EXPECT_DOUBLE_EQ(s.beta, pi / 2);
}

TEST(IntraFingerAngles, Parallel) {
  const Vec3 d(0, 1, 0);
  const auto g = intra_finger_angles(fan_frame({d, d, d, d}));
  for (double v : g) EXPECT_EQ(v, 0.0);
}

TEST(IntraFingerAngles, PlanarFortyFive) {
  const Vec3 m = Vec3(1, 1, 0) / std::sqrt(2.0);
  const auto g = intra_finger_angles(fan_frame({Vec3(0, 1, 0), m, m, m}));
  EXPECT_NEAR(g[0], pi / 4, 1e-15);
  EXPECT_EQ(g[1], 0.0);
  EXPECT_EQ(g[2], 0.0);
}

TEST(IntraFingerAngles, FifteenDegreeSpread) {
  std::array<Vec3, 4> dirs;
  for (int k = 0; k < 4; ++k) {
    const double a = k * 15.0 * pi / 180.0;
    dirs[k] = Vec3(std::sin(a), std::cos(a), 0);
  }
  const auto g = intra_finger_angles(fan_frame(dirs));
  for (double v : g) EXPECT_NEAR(v, 0.2618, 1e-4);
  for (double v : g) EXPECT_NEAR(v, pi / 12, 1e-9);
}

TEST(Displacements, Examples) {
  const HandFrame f = pose_frame(2);
  auto d = displacements(&f, f);
  for (const auto& t : d.tips) EXPECT_EQ(t, Vec3::Zero());
  EXPECT_EQ(d.palm, Vec3::Zero());

  d = displacements(nullptr, f);
  for (const auto& t : d.tips) EXPECT_EQ(t, Vec3::Zero());
  EXPECT_EQ(d.palm, Vec3::Zero());

  HandFrame g = f;
  g.set(HandPointId::palm(), f.palm_center() + Vec3(1, 2, 3));
  d = displacements(&f, g);
  EXPECT_TRUE(d.palm.isApprox(Vec3(1, 2, 3), 1e-12));
  for (const auto& t : d.tips) EXPECT_EQ(t, Vec3::Zero());
}

TEST(FeatureVector, FlattenOrderAndRoundTrip) {
  FeatureVector f;
  for (int j = 0; j < 5; ++j) {
    f.omega[j] = 1 + j;
    f.beta[j] = 6 + j;
    f.tip_disp[j] = Vec3(11 + 3 * j, 12 + 3 * j, 13 + 3 * j);
  }
  f.palm_disp = Vec3(26, 27, 28);
  f.gamma = {29, 30, 31};
  const FlatFeatures x = f.flatten();
  ASSERT_EQ(x.size(), 31);
  for (int k = 0; k < 31; ++k) EXPECT_EQ(x[k], k + 1.0);
  EXPECT_EQ(FeatureVector::unflatten(x), f);
}

TEST(FeatureMask, ParseAndPrint) {
  EXPECT_EQ(FeatureMask::parse("all"), FeatureMask::all());
  const auto m = FeatureMask::parse("omega+beta");
  EXPECT_TRUE(m.omega && m.beta && !m.gamma && !m.displacements);
  EXPECT_EQ(FeatureMask::parse(m.to_string()), m);
  EXPECT_THROW(FeatureMask::parse(""), Error);
  EXPECT_THROW(FeatureMask::parse("omega+nonsense"), Error);
}

TEST(ExtractFeatures, SingleFrame) {
  const auto v = extract_features(static_sequence(1));
  ASSERT_EQ(v.size(), 1u);
  for (const auto& t : v[0].tip_disp) EXPECT_EQ(t, Vec3::Zero());
  EXPECT_EQ(v[0].palm_disp, Vec3::Zero());
}

TEST(ExtractFeatures, StaticHandConstant) {
  const auto v = extract_features(static_sequence(10));
  ASSERT_EQ(v.size(), 10u);
  for (const auto& f : v) {
    EXPECT_EQ(f, v[0]);
    EXPECT_EQ(f.palm_disp, Vec3::Zero());
  }
}

TEST(ExtractFeatures, OmegaOnlyMask) {
  const auto cap = synthetic_capture(SyntheticSpec{}, 1, 0, 0);
  const auto v = extract_features(cap.sequence, FeatureMask::parse("omega"));
  for (const auto& f : v) {
    const FlatFeatures x = f.flatten();
    for (int k = 5; k < 31; ++k) EXPECT_EQ(x[k], 0.0);
  }
}

TEST(ExtractFeatures, AnglesInRangeAndFinite) {
  const auto cap = synthetic_capture(SyntheticSpec{}, 2, 1, 1);
  for (const auto& f : extract_features(cap.sequence)) {
    const FlatFeatures x = f.flatten();
    EXPECT_TRUE(x.allFinite());
    for (std::size_t k : {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 28, 29, 30}) {
      EXPECT_GE(x[k], 0.0);
      EXPECT_LE(x[k], pi);
    }
  }
}

TEST(ExtractFeatures, DegenerateBoneNamesFrame) {
  RawSequence s = static_sequence(4);
  const Vec3 a = s.frames[2].pos(Finger::Index, Joint::A);
  s.frames[2].set(HandPointId::of(Finger::Index, Joint::B), a);
  try {
    extract_features(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateBone);
    EXPECT_NE(e.detail().find("frame 2"), std::string::npos);
  }
}

TEST(FeatureProperties, RigidTransformLeavesAnglesUnchanged) {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const HandFrame f = pose_frame(100 + static_cast<std::uint64_t>(trial));
    const Eigen::Quaterniond q =
        Eigen::Quaterniond(rng.normal(), rng.normal(), rng.normal(), rng.normal()).normalized();
    const Vec3 shift(rng.uniform(-500, 500), rng.uniform(-500, 500), rng.uniform(-500, 500));
    HandFrame g = f;
    for (auto& p : g.points) *p = q * *p + shift;
    const FeatureVector a = frame_features(nullptr, f);
    const FeatureVector b = frame_features(nullptr, g);
    for (int j = 0; j < 5; ++j) {
      EXPECT_NEAR(a.omega[j], b.omega[j], 1e-9);
      EXPECT_NEAR(a.beta[j], b.beta[j], 1e-9);
    }
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(a.gamma[j], b.gamma[j], 1e-9);
  }
}

TEST(FeatureProperties, DisplacementTranslationEquivariance) {
  const auto cap = synthetic_capture(SyntheticSpec{}, 0, 2, 0);
  const auto base = extract_features(cap.sequence);
  // Whole-sequence offset: displacements unchanged (integer offset, exact up to rounding of the positions).
  RawSequence moved = cap.sequence;
  for (auto& f : moved.frames)
    for (auto& p : f.points) *p += Vec3(64, -128, 32);
  const auto all = extract_features(moved);
  for (std::size_t t = 0; t < base.size(); ++t) {
    EXPECT_TRUE(all[t].palm_disp.isApprox(base[t].palm_disp, 1e-9) ||
                (all[t].palm_disp - base[t].palm_disp).norm() < 1e-9);
  }
  // Offset only frame t: instant t shifts by +c, instant t+1 by -c, nothing else moves.
  const std::size_t t0 = 5;
  const Vec3 c(1.5, -2.0, 0.25);
  RawSequence one = cap.sequence;
  for (auto& p : one.frames[t0].points) *p += c;
  const auto shifted = extract_features(one);
  for (std::size_t t = 0; t < base.size(); ++t) {
    const Vec3 expect = t == t0 ? c : (t == t0 + 1 ? Vec3(-c) : Vec3::Zero());
    EXPECT_LT((shifted[t].palm_disp - base[t].palm_disp - expect).norm(), 1e-9) << "t=" << t;
    for (int j = 0; j < 5; ++j)
      EXPECT_LT((shifted[t].tip_disp[j] - base[t].tip_disp[j] - expect).norm(), 1e-9) << "t=" << t;
  }
}
