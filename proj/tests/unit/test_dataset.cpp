#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include "hgr/dataset.hpp"
#include "hgr/synthetic.hpp"
#include "oracles/shrec_fixture.hpp"

using namespace hgr;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("hgr_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

NativeCapture random_capture(Rng& rng) {
  NativeCapture cap;
  cap.subject = "subj" + std::to_string(rng.uniform_index(100));
  cap.label = "L" + std::to_string(rng.uniform_index(30));
  cap.frame_rate = rng.uniform(20, 200);
  const std::size_t n = 1 + rng.uniform_index(40);
  double ts = rng.uniform(0, 1);
  for (std::size_t t = 0; t < n; ++t) {
    HandFrame f;
    f.timestamp = ts;
    ts += rng.uniform(0, 0.05);
    for (auto& p : f.points) p = Vec3(rng.normal() * 100, rng.normal() * 1e-3, rng.normal() * 1e6);
    cap.sequence.frames.push_back(f);
  }
  cap.sequence.duration = static_cast<double>(n) / cap.frame_rate;
  return cap;
}

bool same_sequence(const RawSequence& a, const RawSequence& b) {
  if (a.frames.size() != b.frames.size() || a.duration != b.duration) return false;
  for (std::size_t t = 0; t < a.frames.size(); ++t) {
    if (a.frames[t].timestamp != b.frames[t].timestamp) return false;
    for (std::size_t i = 0; i < kPointCount; ++i)
      if (*a.frames[t].points[i] != *b.frames[t].points[i]) return false;
  }
  return true;
}

}  // namespace

TEST(Native, RoundTripLossless) {
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    const NativeCapture cap = random_capture(rng);
    const NativeCapture back = parse_native(serialize_native(cap));
    EXPECT_EQ(back.subject, cap.subject);
    EXPECT_EQ(back.label, cap.label);
    EXPECT_EQ(back.frame_rate, cap.frame_rate);
    EXPECT_TRUE(same_sequence(back.sequence, cap.sequence));
  }
}

TEST(Native, FileRoundTrip) {
  TempDir dir("native_file");
  Rng rng(2);
  const NativeCapture cap = random_capture(rng);
  save_native(dir.path / "a.gestcap", cap);
  EXPECT_TRUE(same_sequence(load_native(dir.path / "a.gestcap").sequence, cap.sequence));
}

TEST(Native, Errors) {
  Rng rng(3);
  const std::string good = serialize_native(random_capture(rng));
  const std::string header_only = good.substr(0, good.find('\n', good.find("frame_rate")) + 1);
  try {
    parse_native(header_only);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptySequence);
  }
  std::string v2 = good;
  v2.replace(0, 10, "GESTCAP v2");
  try {
    parse_native(v2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BadHeader);
  }
  std::string short_line = header_only + "0 1 2 3\n";
  try {
    parse_native(short_line, "x.gestcap");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MalformedFrame);
    EXPECT_NE(e.detail().find("x.gestcap:5"), std::string::npos) << e.detail();
  }
}

TEST(Shrec, FixtureTreeLoads) {
  TempDir dir("shrec_fixture");
  oracle::ShrecFixture fx;
  oracle::write_shrec_fixture(dir.path, fx);
  const RawDataset ds14 = load_shrec(dir.path, ShrecGranularity::Classes14);
  EXPECT_EQ(ds14.sequences.size(), static_cast<std::size_t>(fx.gestures * 2 * fx.subjects * fx.essais));
  EXPECT_EQ(ds14.manifest.label_names, (std::vector<std::string>{"g1", "g2", "g3"}));
  const RawDataset ds28 = load_shrec(dir.path, ShrecGranularity::Classes28);
  EXPECT_EQ(ds28.manifest.classes(), 6);
  EXPECT_EQ(ds28.manifest.label_names[0], "g1_one");
  EXPECT_EQ(ds28.manifest.label_names[1], "g1_whole");
  for (const auto& e : ds14.manifest.entries) {
    EXPECT_EQ(e.split == Split::Test, e.subject == std::to_string(fx.subjects));
  }
  const RawDataset sub = load_shrec(dir.path, ShrecGranularity::Classes14, {1, 3});
  EXPECT_EQ(sub.manifest.label_names, (std::vector<std::string>{"g1", "g3"}));
}

TEST(Shrec, JointMappingAndUnits) {
  TempDir dir("shrec_map");
  oracle::ShrecFixture fx;
  fx.gestures = 1;
  fx.subjects = 2;
  oracle::write_shrec_fixture(dir.path, fx);
  hgr::SyntheticSpec spec;
  spec.classes = 2;
  spec.subjects = 2;
  spec.repetitions = 1;
  spec.min_frames = 20;
  spec.max_frames = 60;
  spec.seed = fx.seed;
  const auto cap = synthetic_capture(spec, 0, 0, 0);
  const RawDataset ds = load_shrec(dir.path, ShrecGranularity::Classes14);
  const RawSequence& s = ds.sequences.front();  // gesture 1, finger 1, subject 1
  ASSERT_EQ(s.frames.size(), cap.sequence.frames.size());
  for (std::size_t i = 0; i < kPointCount; ++i) {
    EXPECT_LT((*s.frames[3].points[i] - *cap.sequence.frames[3].points[i]).norm(), 1e-9);
  }
  EXPECT_DOUBLE_EQ(s.frames[3].timestamp, 3.0 / 30.0);
  EXPECT_DOUBLE_EQ(s.duration, static_cast<double>(s.frames.size()) / 30.0);
}

TEST(Shrec, MalformedLineNamesLine) {
  std::string line;
  for (int k = 0; k < 66; ++k) line += "0.1 ";
  const std::string good = line + "\n";
  const std::string bad = line.substr(0, line.size() - 4) + "\n";  // 65 numbers
  try {
    parse_shrec_skeleton(good + good + bad, "s.txt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MalformedFrame);
    EXPECT_NE(e.detail().find("s.txt:3"), std::string::npos) << e.detail();
  }
}

TEST(Shrec, MissingListFile) {
  TempDir dir("shrec_missing");
  try {
    load_shrec(dir.path, ShrecGranularity::Classes14);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingListFile);
    EXPECT_NE(e.detail().find("train_gestures.txt"), std::string::npos);
  }
}

TEST(Merge, ThirtyToTwentyEight) {
  DatasetManifest m;
  for (int k = 0; k < 24; ++k) m.label_names.push_back(std::string(1, static_cast<char>('A' + k)));
  for (int k = 0; k < 6; ++k) m.label_names.push_back(std::to_string(k + 1));
  // 30 labels: A..X, 1..6; W and V are letters.
  for (const auto& n : m.label_names) m.entries.push_back({n + ".gestcap", n, "s1", {}, Split::Unassigned});
  const auto merged = apply_merge_rules(m, parse_merge_rules("6+W=6W;2+V=2V"));
  EXPECT_EQ(merged.classes(), 28);
  std::set<std::string> names(merged.label_names.begin(), merged.label_names.end());
  EXPECT_EQ(names.size(), 28u);
  EXPECT_TRUE(names.contains("6W") && names.contains("2V"));
  EXPECT_FALSE(names.contains("W") || names.contains("6"));
  for (const auto& e : merged.entries) EXPECT_GE(merged.label_index(e.label), 0);
  EXPECT_THROW(apply_merge_rules(m, parse_merge_rules("Q1+A=Z")), Error);
  EXPECT_THROW(parse_merge_rules("6+W"), Error);
}

TEST(Prepare, SubjectDisjointFourteenSix) {
  SyntheticSpec spec;
  spec.classes = 2;
  spec.subjects = 20;
  spec.repetitions = 1;
  spec.min_frames = 15;
  spec.max_frames = 30;
  const RawDataset raw = make_synthetic_dataset(spec);
  PrepareConfig cfg;
  cfg.target_length = 12;
  const PreparedDataset ds = prepare(raw.manifest, raw.sequences, cfg);
  EXPECT_EQ(ds.train.size(), 28u);
  EXPECT_EQ(ds.test.size(), 12u);
  std::set<std::string> tr, te;
  for (const auto& s : ds.train) tr.insert(s.id.substr(s.id.find("/s"), 4));
  for (const auto& s : ds.test) te.insert(s.id.substr(s.id.find("/s"), 4));
  EXPECT_EQ(tr.size(), 14u);
  EXPECT_EQ(te.size(), 6u);
  for (const auto& s : tr) EXPECT_FALSE(te.contains(s));
  for (const auto* set : {&ds.train, &ds.test})
    for (const auto& s : *set) EXPECT_EQ(s.sequence.length(), 12u);
}

TEST(Prepare, OverlappingPresetSplitRejected) {
  const RawDataset raw = make_synthetic_dataset(SyntheticSpec{});
  DatasetManifest m = raw.manifest;
  m.entries[0].split = Split::Test;  // subject s00, others from s00 unassigned -> train
  PrepareConfig cfg;
  cfg.target_length = 10;
  try {
    prepare(m, raw.sequences, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SplitOverlap);
  }
}

TEST(Prepare, MaskZeroesGroupsAndKeepsShape) {
  const RawDataset raw = make_synthetic_dataset(SyntheticSpec{});
  PrepareConfig cfg;
  cfg.target_length = 20;
  cfg.train_subjects = 3;
  cfg.mask = FeatureMask::parse("beta");
  const PreparedDataset ds = prepare(raw.manifest, raw.sequences, cfg);
  for (const auto& s : ds.train) {
    EXPECT_EQ(s.sequence.x.rows(), 31);
    EXPECT_TRUE(s.sequence.x.topRows(5).isZero(0));
    EXPECT_FALSE(s.sequence.x.middleRows(5, 5).isZero(0));
    EXPECT_TRUE(s.sequence.x.bottomRows(21).isZero(0));
  }
}

TEST(Prepare, Deterministic) {
  const RawDataset raw = make_synthetic_dataset(SyntheticSpec{});
  PrepareConfig cfg;
  cfg.target_length = 25;
  cfg.train_subjects = 4;
  const PreparedDataset a = prepare(raw.manifest, raw.sequences, cfg);
  const PreparedDataset b = prepare(raw.manifest, raw.sequences, cfg);
  EXPECT_EQ(serialize_prepared(a, "k"), serialize_prepared(b, "k"));
}

TEST(PreparedCache, RoundTripAndKey) {
  const RawDataset raw = make_synthetic_dataset(SyntheticSpec{});
  PrepareConfig cfg;
  cfg.target_length = 15;
  cfg.train_subjects = 4;
  const PreparedDataset ds = prepare(raw.manifest, raw.sequences, cfg);
  const std::string key = prepared_cache_key(raw.manifest, cfg);
  const std::string bytes = serialize_prepared(ds, key);
  const auto [back, back_key] = deserialize_prepared(bytes);
  EXPECT_EQ(back_key, key);
  EXPECT_EQ(serialize_prepared(back, back_key), bytes);
  EXPECT_THROW(deserialize_prepared(bytes.substr(0, bytes.size() - 3)), Error);

  PrepareConfig other = cfg;
  other.seed = 1;
  EXPECT_NE(prepared_cache_key(raw.manifest, other), key);
  other = cfg;
  other.sampling.sg_window = 7;
  EXPECT_NE(prepared_cache_key(raw.manifest, other), key);
  SyntheticSpec spec2;
  spec2.seed = 2;
  EXPECT_NE(prepared_cache_key(make_synthetic_dataset(spec2).manifest, cfg), key);
}

TEST(NativeDir, LoadsSortedLabels) {
  TempDir dir("native_dir");
  SyntheticSpec spec;
  spec.classes = 3;
  spec.subjects = 2;
  spec.repetitions = 1;
  for (int c = 2; c >= 0; --c)
    for (int s = 0; s < 2; ++s)
      save_native(dir.path / ("c" + std::to_string(c) + "_s" + std::to_string(s) + ".gestcap"),
                  synthetic_capture(spec, c, s, 0));
  const RawDataset ds = load_native_dir(dir.path);
  EXPECT_EQ(ds.manifest.label_names, (std::vector<std::string>{"c0", "c1", "c2"}));
  EXPECT_EQ(ds.sequences.size(), 6u);
  EXPECT_EQ(ds.manifest.entries[0].path, "c0_s0.gestcap");
}
