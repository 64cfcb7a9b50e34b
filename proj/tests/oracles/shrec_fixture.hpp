#pragma once

// Writes a miniature SHREC'17-layout tree from synthetic captures, so the
// loader can be exercised without the real dataset.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "hgr/synthetic.hpp"

namespace oracle {

struct ShrecFixture {
  int gestures = 3;
  int subjects = 4;          // subjects 1..subjects; the last one goes to test
  int essais = 1;
  std::uint64_t seed = 5;
};

inline std::string shrec_line(const hgr::HandFrame& f) {
  std::string line;
  char buf[64];
  auto put = [&](const hgr::Vec3& p) {
    for (int k = 0; k < 3; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g ", p[k] / hgr::kShrecUnitScale);
      line += buf;
    }
  };
  put(f.palm_center() + hgr::Vec3(0, -60, 0));  // wrist, ignored by the loader
  put(f.palm_center());
  for (std::size_t j = 0; j < 5; ++j)
    for (std::size_t k = 0; k < 4; ++k)
      put(f.pos(static_cast<hgr::Finger>(j), static_cast<hgr::Joint>(k)));
  line.back() = '\n';
  return line;
}

/// Gesture g (1-based) performed with finger mode 1 and 2 by every subject.
inline void write_shrec_fixture(const std::filesystem::path& root, const ShrecFixture& fx) {
  namespace fs = std::filesystem;
  hgr::SyntheticSpec spec;
  spec.classes = fx.gestures * 2;
  spec.subjects = fx.subjects;
  spec.repetitions = fx.essais;
  spec.min_frames = 20;
  spec.max_frames = 60;
  spec.seed = fx.seed;
  std::ofstream train(root / "train_gestures.txt"), test(root / "test_gestures.txt");
  for (int g = 1; g <= fx.gestures; ++g) {
    for (int finger = 1; finger <= 2; ++finger) {
      for (int s = 1; s <= fx.subjects; ++s) {
        for (int e = 1; e <= fx.essais; ++e) {
          const auto cap = hgr::synthetic_capture(spec, (g - 1) * 2 + finger - 1, s - 1, e - 1);
          const fs::path dir = root / ("gesture_" + std::to_string(g)) / ("finger_" + std::to_string(finger)) /
                               ("subject_" + std::to_string(s)) / ("essai_" + std::to_string(e));
          fs::create_directories(dir);
          std::ofstream out(dir / "skeletons_world.txt");
          for (const auto& f : cap.sequence.frames) out << shrec_line(f);
          const int label28 = 2 * (g - 1) + finger;
          (s == fx.subjects ? test : train) << g << ' ' << finger << ' ' << s << ' ' << e << ' ' << g << ' '
                                            << label28 << ' ' << cap.sequence.frames.size() << '\n';
        }
      }
    }
  }
}

}  // namespace oracle
