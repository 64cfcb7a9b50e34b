#pragma once

// Dataset ingestion: SHREC'17 skeleton trees, the native GESTCAP capture
// format, label merging, subject-disjoint splits, and the prepared-set cache.

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "hgr/error.hpp"
#include "hgr/features.hpp"
#include "hgr/rng.hpp"
#include "hgr/sampling.hpp"
#include "hgr/skeleton.hpp"
#include "hgr/training.hpp"

namespace hgr {

namespace fs = std::filesystem;

enum class Split { Unassigned, Train, Test };

struct ManifestEntry {
  std::string path;     // file the sequence came from (or a synthetic:// tag)
  std::string label;    // class name
  std::string subject;  // non-empty
  std::vector<std::string> tags;
  Split split = Split::Unassigned;  // preset by list files; otherwise decided in prepare()
};

struct MergeRule {
  std::vector<std::string> from;
  std::string to;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::vector<std::string> label_names;  // index = dense class id
  std::vector<MergeRule> merge_rules;  // applied by prepare()

  int classes() const { return static_cast<int>(label_names.size()); }

  int label_index(const std::string& name) const {
    const auto it = std::find(label_names.begin(), label_names.end(), name);
    if (it == label_names.end()) throw Error(ErrorKind::BadLabel, "unknown label '" + name + "'");
    return static_cast<int>(it - label_names.begin());
  }
};

/// Manifest plus the raw sequences, index-aligned with manifest.entries.
struct RawDataset {
  DatasetManifest manifest;
  std::vector<RawSequence> sequences;
};

// ---------------------------------------------------------------------------
// Number parsing helpers

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<long> parse_long(std::string_view s) {
  long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& p, std::string_view content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + p.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed for " + p.string());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// SHREC'17
//
// Each skeletons_world.txt line holds 22 joints x (x, y, z): wrist, palm,
// then base/first/second/tip for thumb, index, middle, ring and pinky. The
// wrist is dropped; palm -> palm centre; base/first/second/tip -> A/B/C/D.

inline constexpr std::size_t kShrecJoints = 22;
inline constexpr double kShrecFrameRate = 30.0;
/// SHREC world coordinates are metres; the skeleton model uses millimetres.
inline constexpr double kShrecUnitScale = 1000.0;

inline HandFrame shrec_frame_from_values(const std::vector<double>& v, double timestamp) {
  HandFrame f;
  f.timestamp = timestamp;
  auto joint = [&](std::size_t j) -> Vec3 {
    return Vec3(v[3 * j], v[3 * j + 1], v[3 * j + 2]) * kShrecUnitScale;
  };
  f.set(HandPointId::palm(), joint(1));
  for (std::size_t finger = 0; finger < kFingerCount; ++finger) {
    for (std::size_t k = 0; k < kJointsPerFinger; ++k) {
      f.set(HandPointId::of(static_cast<Finger>(finger), static_cast<Joint>(k)),
            joint(2 + finger * kJointsPerFinger + k));
    }
  }
  return f;
}

/// Parses one SHREC skeleton file body. `origin` is used in error messages.
inline RawSequence parse_shrec_skeleton(std::string_view text, const std::string& origin) {
  RawSequence seq;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const auto toks = detail::split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() != 3 * kShrecJoints) {
      throw Error(ErrorKind::MalformedFrame, origin + ":" + std::to_string(line_no) + ": expected " +
                                                 std::to_string(3 * kShrecJoints) + " numbers, got " +
                                                 std::to_string(toks.size()));
    }
    std::vector<double> vals;
    vals.reserve(toks.size());
    for (auto tok : toks) {
      const auto d = detail::parse_double(tok);
      if (!d || !std::isfinite(*d)) {
        throw Error(ErrorKind::MalformedFrame,
                    origin + ":" + std::to_string(line_no) + ": bad number '" + std::string(tok) + "'");
      }
      vals.push_back(*d);
    }
    seq.frames.push_back(
        shrec_frame_from_values(vals, static_cast<double>(seq.frames.size()) / kShrecFrameRate));
  }
  if (seq.frames.empty()) throw Error(ErrorKind::EmptySequence, origin + ": no frames");
  seq.duration = static_cast<double>(seq.frames.size()) / kShrecFrameRate;
  return seq;
}

enum class ShrecGranularity { Classes14, Classes28 };

struct ShrecListRow {
  int gesture = 0;
  int finger = 0;
  int subject = 0;
  int essai = 0;
  int label14 = 0;
  int label28 = 0;
  int size = 0;
};

inline std::vector<ShrecListRow> read_shrec_list(const fs::path& file) {
  if (!fs::exists(file)) throw Error(ErrorKind::MissingListFile, file.string());
  const std::string text = detail::read_file(file);
  std::vector<ShrecListRow> rows;
  std::istringstream is(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto toks = detail::split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() < 7) {
      throw Error(ErrorKind::MalformedFrame,
                  file.string() + ":" + std::to_string(line_no) + ": expected 7 columns");
    }
    int v[7];
    for (int k = 0; k < 7; ++k) {
      const auto n = detail::parse_long(toks[static_cast<std::size_t>(k)]);
      if (!n) {
        throw Error(ErrorKind::MalformedFrame,
                    file.string() + ":" + std::to_string(line_no) + ": non-integer column");
      }
      v[k] = static_cast<int>(*n);
    }
    rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6]});
  }
  return rows;
}

inline fs::path shrec_sequence_dir(const fs::path& root, const ShrecListRow& r) {
  return root / ("gesture_" + std::to_string(r.gesture)) / ("finger_" + std::to_string(r.finger)) /
         ("subject_" + std::to_string(r.subject)) / ("essai_" + std::to_string(r.essai));
}

/// Loads the official train/test lists and every listed skeleton file. An
/// optional gesture filter (1-based SHREC gesture ids) keeps a subset; labels
/// are then re-densified in gesture order.
inline RawDataset load_shrec(const fs::path& root, ShrecGranularity granularity,
                             const std::vector<int>& gesture_filter = {}) {
  RawDataset ds;
  struct Pending {
    ShrecListRow row;
    Split split;
  };
  std::vector<Pending> rows;
  for (const auto& [name, split] : {std::pair{"train_gestures.txt", Split::Train},
                                    std::pair{"test_gestures.txt", Split::Test}}) {
    for (const auto& r : read_shrec_list(root / name)) {
      if (!gesture_filter.empty() &&
          std::find(gesture_filter.begin(), gesture_filter.end(), r.gesture) == gesture_filter.end()) {
        continue;
      }
      rows.push_back({r, split});
    }
  }
  auto label_of = [&](const ShrecListRow& r) {
    return granularity == ShrecGranularity::Classes14 ? r.label14 : r.label28;
  };
  std::set<int> used;
  for (const auto& p : rows) used.insert(label_of(p.row));
  for (int l : used) {
    ds.manifest.label_names.push_back(granularity == ShrecGranularity::Classes14
                                          ? "g" + std::to_string(l)
                                          : "g" + std::to_string((l + 1) / 2) +
                                                (l % 2 == 1 ? "_one" : "_whole"));
  }
  std::map<int, std::size_t> dense;
  for (int l : used) dense.emplace(l, dense.size());

  for (const auto& p : rows) {
    const fs::path file = shrec_sequence_dir(root, p.row) / "skeletons_world.txt";
    if (!fs::exists(file)) throw Error(ErrorKind::Io, "missing skeleton file " + file.string());
    ManifestEntry e;
    e.path = fs::relative(file, root).generic_string();
    e.label = ds.manifest.label_names[dense.at(label_of(p.row))];
    e.subject = std::to_string(p.row.subject);
    e.tags = {"finger_" + std::to_string(p.row.finger), "essai_" + std::to_string(p.row.essai)};
    e.split = p.split;
    ds.sequences.push_back(parse_shrec_skeleton(detail::read_file(file), file.string()));
    ds.manifest.entries.push_back(std::move(e));
  }
  return ds;
}

// ---------------------------------------------------------------------------
// GESTCAP v1
//
//   GESTCAP v1
//   subject <id>
//   label <name>
//   frame_rate <hz>
//   <timestamp> <x y z> x 21      one line per frame
//
// Point order: thumb A B C D, index A B C D, middle, ring, pinky, palm centre
// (HandPointId::index order). Numbers use shortest round-trip formatting.

inline constexpr const char* kNativeMagic = "GESTCAP v1";

struct NativeCapture {
  std::string subject;
  std::string label;
  double frame_rate = 100.0;
  RawSequence sequence;
};

inline std::string serialize_native(const NativeCapture& cap) {
  for (const std::string* s : {&cap.subject, &cap.label}) {
    if (s->empty() || s->find('\n') != std::string::npos) {
      throw Error(ErrorKind::BadHeader, "subject/label must be non-empty single-line text");
    }
  }
  validate_sequence(cap.sequence);
  std::string out;
  out += kNativeMagic;
  out += "\nsubject " + cap.subject + "\nlabel " + cap.label +
         "\nframe_rate " + detail::format_double(cap.frame_rate) + "\n";
  for (const HandFrame& f : cap.sequence.frames) {
    out += detail::format_double(f.timestamp);
    for (std::size_t i = 0; i < kPointCount; ++i) {
      const Vec3& p = *f.points[i];
      for (int a = 0; a < 3; ++a) {
        out += ' ';
        out += detail::format_double(p[a]);
      }
    }
    out += '\n';
  }
  return out;
}

inline NativeCapture parse_native(std::string_view text, const std::string& origin = "<memory>") {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view l = text.substr(pos, end - pos);
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    lines.push_back(l);
    pos = end + 1;
  }
  if (lines.empty() || lines[0] != kNativeMagic) {
    throw Error(ErrorKind::BadHeader, origin + ": expected '" + std::string(kNativeMagic) + "'");
  }
  NativeCapture cap;
  auto header = [&](std::size_t idx, std::string_view key) -> std::string {
    if (idx >= lines.size() || lines[idx].substr(0, key.size() + 1) != std::string(key) + " ") {
      throw Error(ErrorKind::BadHeader, origin + ": missing '" + std::string(key) + "' header");
    }
    return std::string(lines[idx].substr(key.size() + 1));
  };
  cap.subject = header(1, "subject");
  cap.label = header(2, "label");
  const auto rate = detail::parse_double(header(3, "frame_rate"));
  if (!rate || !(*rate > 0.0) || !std::isfinite(*rate)) {
    throw Error(ErrorKind::BadHeader, origin + ": bad frame_rate");
  }
  cap.frame_rate = *rate;
  if (cap.subject.empty() || cap.label.empty()) {
    throw Error(ErrorKind::BadHeader, origin + ": empty subject or label");
  }
  for (std::size_t li = 4; li < lines.size(); ++li) {
    const auto toks = detail::split_ws(lines[li]);
    if (toks.empty()) continue;
    const std::string where = origin + ":" + std::to_string(li + 1);
    if (toks.size() != 1 + 3 * kPointCount) {
      throw Error(ErrorKind::MalformedFrame, where + ": expected " + std::to_string(1 + 3 * kPointCount) +
                                                 " numbers, got " + std::to_string(toks.size()));
    }
    std::vector<double> v;
    for (auto tok : toks) {
      const auto d = detail::parse_double(tok);
      if (!d) throw Error(ErrorKind::MalformedFrame, where + ": bad number '" + std::string(tok) + "'");
      v.push_back(*d);
    }
    HandFrame f;
    f.timestamp = v[0];
    for (std::size_t i = 0; i < kPointCount; ++i) {
      f.points[i] = Vec3(v[1 + 3 * i], v[2 + 3 * i], v[3 + 3 * i]);
    }
    cap.sequence.frames.push_back(std::move(f));
  }
  if (cap.sequence.frames.empty()) throw Error(ErrorKind::EmptySequence, origin + ": no frames");
  cap.sequence.duration = static_cast<double>(cap.sequence.frames.size()) / cap.frame_rate;
  try {
    validate_sequence(cap.sequence);
  } catch (const Error& e) {
    throw Error(e.kind(), origin + ": " + e.detail());
  }
  return cap;
}

inline void save_native(const fs::path& path, const NativeCapture& cap) {
  detail::write_file(path, serialize_native(cap));
}

inline NativeCapture load_native(const fs::path& path) {
  return parse_native(detail::read_file(path), path.string());
}

/// Every *.gestcap file below `root`, sorted by relative path. Label names are
/// sorted lexicographically.
inline RawDataset load_native_dir(const fs::path& root) {
  if (!fs::is_directory(root)) throw Error(ErrorKind::Io, "not a directory: " + root.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file() && e.path().extension() == ".gestcap") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error(ErrorKind::EmptySequence, "no .gestcap files under " + root.string());
  RawDataset ds;
  std::set<std::string> labels;
  for (const auto& p : files) {
    NativeCapture cap = load_native(p);
    labels.insert(cap.label);
    ds.manifest.entries.push_back({fs::relative(p, root).generic_string(), cap.label, cap.subject, {},
                                   Split::Unassigned});
    ds.sequences.push_back(std::move(cap.sequence));
  }
  ds.manifest.label_names.assign(labels.begin(), labels.end());
  return ds;
}

// ---------------------------------------------------------------------------
// Label merging

/// Parses "6+W=6W;2+V=2V".
inline std::vector<MergeRule> parse_merge_rules(std::string_view text) {
  std::vector<MergeRule> rules;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find(';', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view item = text.substr(pos, end - pos);
    pos = end + 1;
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos || eq + 1 >= item.size()) {
      throw Error(ErrorKind::BadConfig, "merge rule needs 'a+b=c': " + std::string(item));
    }
    MergeRule r;
    r.to = std::string(item.substr(eq + 1));
    std::string_view lhs = item.substr(0, eq);
    std::size_t p = 0;
    while (p <= lhs.size()) {
      std::size_t q = std::min(lhs.find('+', p), lhs.size());
      if (q > p) r.from.emplace_back(lhs.substr(p, q - p));
      p = q + 1;
    }
    if (r.from.empty()) throw Error(ErrorKind::BadConfig, "merge rule without sources");
    rules.push_back(std::move(r));
  }
  return rules;
}

/// Relabels entries by the rules and re-densifies: the merged class takes the
/// position of its first source label; other labels keep their relative order.
inline DatasetManifest apply_merge_rules(DatasetManifest m, const std::vector<MergeRule>& rules) {
  std::map<std::string, std::string> rename;
  for (const auto& r : rules) {
    for (const auto& f : r.from) {
      if (std::find(m.label_names.begin(), m.label_names.end(), f) == m.label_names.end()) {
        throw Error(ErrorKind::BadLabel, "merge source '" + f + "' is not a label");
      }
      rename[f] = r.to;
    }
  }
  std::vector<std::string> names;
  for (const auto& n : m.label_names) {
    const auto it = rename.find(n);
    const std::string& target = it == rename.end() ? n : it->second;
    if (std::find(names.begin(), names.end(), target) == names.end()) names.push_back(target);
  }
  for (auto& e : m.entries) {
    const auto it = rename.find(e.label);
    if (it != rename.end()) e.label = it->second;
  }
  m.label_names = std::move(names);
  m.merge_rules.insert(m.merge_rules.end(), rules.begin(), rules.end());
  return m;
}

// ---------------------------------------------------------------------------
// Preparation

struct PrepareConfig {
  std::size_t target_length = 200;
  FeatureMask mask = FeatureMask::all();
  std::uint64_t seed = 0;
  SamplingParams sampling{};
  /// Subjects (sorted by id) that form the training set when entries carry no
  /// preset split; the rest go to test.
  std::size_t train_subjects = 14;
};

struct PreparedDataset {
  std::vector<LabeledSequence> train;
  std::vector<LabeledSequence> test;
  std::vector<std::string> label_names;
  std::size_t target_length = 0;

  int classes() const { return static_cast<int>(label_names.size()); }
};

/// Zeroes the rows of disabled feature groups in a sampled sequence.
inline void mask_sequence(GestureSequence& seq, const FeatureMask& mask) {
  using namespace feature_index;
  if (!mask.omega) seq.x.middleRows(kOmega, 5).setZero();
  if (!mask.beta) seq.x.middleRows(kBeta, 5).setZero();
  if (!mask.displacements) seq.x.middleRows(kTipDisp, 18).setZero();
  if (!mask.gamma) seq.x.middleRows(kGamma, 3).setZero();
}

/// Features are extracted unmasked so the sampling tracks are the same for
/// every ablation; the mask is applied to the gathered sequence.
inline LabeledSequence prepare_one(const RawSequence& raw, int label, const std::string& id,
                                   std::size_t index, const PrepareConfig& cfg) {
  const auto feats = extract_features(raw);
  LabeledSequence out;
  out.sequence = sample_sequence(feats, cfg.target_length, mix_seed(cfg.seed, index), cfg.sampling);
  mask_sequence(out.sequence, cfg.mask);
  out.label = label;
  out.id = id;
  return out;
}

/// Assigns Train/Test to entries without a preset split: the first
/// `train_subjects` subject ids (lexicographic) train, the rest test.
inline std::vector<Split> resolve_splits(const DatasetManifest& m, std::size_t train_subjects) {
  std::set<std::string> subjects;
  for (const auto& e : m.entries) {
    if (e.subject.empty()) throw Error(ErrorKind::BadLabel, "entry " + e.path + " has no subject id");
    subjects.insert(e.subject);
  }
  std::set<std::string> train_ids;
  for (const auto& s : subjects) {
    if (train_ids.size() == train_subjects) break;
    train_ids.insert(s);
  }
  std::vector<Split> out;
  bool preset_only = true;
  for (const auto& e : m.entries) {
    if (e.split != Split::Unassigned) {
      out.push_back(e.split);
    } else {
      preset_only = false;
      out.push_back(train_ids.contains(e.subject) ? Split::Train : Split::Test);
    }
  }
  if (!preset_only) {
    std::set<std::string> tr, te;
    for (std::size_t k = 0; k < out.size(); ++k) {
      (out[k] == Split::Train ? tr : te).insert(m.entries[k].subject);
    }
    for (const auto& s : tr) {
      if (te.contains(s)) throw Error(ErrorKind::SplitOverlap, "subject " + s + " in train and test");
    }
  }
  return out;
}

inline PreparedDataset prepare(const DatasetManifest& manifest, const std::vector<RawSequence>& raws,
                               const PrepareConfig& cfg) {
  if (manifest.entries.size() != raws.size()) {
    throw Error(ErrorKind::PlanMismatch, "manifest and sequence counts differ");
  }
  DatasetManifest base = manifest;
  base.merge_rules.clear();
  const DatasetManifest m = apply_merge_rules(std::move(base), manifest.merge_rules);
  const auto splits = resolve_splits(m, cfg.train_subjects);
  PreparedDataset out;
  out.label_names = m.label_names;
  out.target_length = cfg.target_length;
  for (std::size_t k = 0; k < raws.size(); ++k) {
    const ManifestEntry& e = m.entries[k];
    LabeledSequence ls;
    try {
      ls = prepare_one(raws[k], m.label_index(e.label), e.path, k, cfg);
    } catch (const Error& err) {
      throw Error(err.kind(), e.path + ": " + err.detail());
    }
    (splits[k] == Split::Train ? out.train : out.test).push_back(std::move(ls));
  }
  return out;
}

/// Hash over entry metadata and label list; identifies a manifest in cache keys.
inline std::uint64_t manifest_hash(const DatasetManifest& m) {
  Fnv1a h;
  for (const auto& n : m.label_names) {
    h.update(n);
    h.update("\x1f");
  }
  for (const auto& e : m.entries) {
    h.update(e.path);
    h.update("\x1f");
    h.update(e.label);
    h.update("\x1f");
    h.update(e.subject);
    h.update("\x1f");
    for (const auto& t : e.tags) {
      h.update(t);
      h.update("\x1d");
    }
    h.update(std::to_string(static_cast<int>(e.split)));
    h.update("\x1e");
  }
  for (const auto& r : m.merge_rules) {
    for (const auto& f : r.from) h.update(f + "+");
    h.update("=" + r.to + ";");
  }
  return h.digest();
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Cache key of a prepared set: manifest, T, mask, seed and smoothing params.
inline std::string prepared_cache_key(const DatasetManifest& m, const PrepareConfig& cfg) {
  std::ostringstream os;
  os << hex64(manifest_hash(m)) << ";T=" << cfg.target_length << ";mask=" << cfg.mask.to_string()
     << ";seed=" << cfg.seed << ";sg=" << cfg.sampling.sg_window << "/" << cfg.sampling.sg_order
     << ";train_subjects=" << cfg.train_subjects;
  return hex64(fnv1a(os.str()));
}

// Prepared-set cache, "HGRPREP v1":
//   text header lines: magic, "key <hex>", "T <n>", "classes <k>", one
//   "label <name>" per class, "train <n>", "test <n>", "data"; then for each
//   train sequence followed by each test sequence: u32 label, u32 id length,
//   id bytes, D*T little-endian IEEE doubles in column-major order.

inline constexpr const char* kPreparedMagic = "HGRPREP v1";

namespace detail {
template <class T>
void put_raw(std::string& out, const T& v) {
  out.append(reinterpret_cast<const char*>(&v), sizeof v);
}
template <class T>
T get_raw(std::string_view& in) {
  if (in.size() < sizeof(T)) throw Error(ErrorKind::BadHeader, "truncated prepared cache");
  T v;
  std::memcpy(&v, in.data(), sizeof v);
  in.remove_prefix(sizeof v);
  return v;
}
}  // namespace detail

inline std::string serialize_prepared(const PreparedDataset& ds, const std::string& key) {
  static_assert(std::endian::native == std::endian::little, "cache format is little-endian");
  std::string out;
  out += std::string(kPreparedMagic) + "\nkey " + key + "\nT " + std::to_string(ds.target_length) +
         "\nclasses " + std::to_string(ds.label_names.size()) + "\n";
  for (const auto& n : ds.label_names) out += "label " + n + "\n";
  out += "train " + std::to_string(ds.train.size()) + "\ntest " + std::to_string(ds.test.size()) +
         "\ndata\n";
  for (const auto* set : {&ds.train, &ds.test}) {
    for (const auto& s : *set) {
      detail::put_raw(out, static_cast<std::uint32_t>(s.label));
      detail::put_raw(out, static_cast<std::uint32_t>(s.id.size()));
      out += s.id;
      out.append(reinterpret_cast<const char*>(s.sequence.x.data()),
                 static_cast<std::size_t>(s.sequence.x.size()) * sizeof(double));
    }
  }
  return out;
}

inline std::pair<PreparedDataset, std::string> deserialize_prepared(std::string_view in) {
  auto line = [&]() {
    const std::size_t nl = in.find('\n');
    if (nl == std::string_view::npos) throw Error(ErrorKind::BadHeader, "truncated prepared cache");
    std::string l(in.substr(0, nl));
    in.remove_prefix(nl + 1);
    return l;
  };
  auto value = [&](const std::string& key) {
    const std::string l = line();
    if (l.rfind(key + " ", 0) != 0) throw Error(ErrorKind::BadHeader, "expected '" + key + "'");
    return l.substr(key.size() + 1);
  };
  if (line() != kPreparedMagic) throw Error(ErrorKind::BadHeader, "not a prepared cache");
  PreparedDataset ds;
  const std::string key = value("key");
  ds.target_length = std::stoul(value("T"));
  const std::size_t k = std::stoul(value("classes"));
  for (std::size_t i = 0; i < k; ++i) ds.label_names.push_back(value("label"));
  const std::size_t ntrain = std::stoul(value("train"));
  const std::size_t ntest = std::stoul(value("test"));
  if (line() != "data") throw Error(ErrorKind::BadHeader, "missing data marker");
  for (auto [set, n] : {std::pair{&ds.train, ntrain}, std::pair{&ds.test, ntest}}) {
    for (std::size_t i = 0; i < n; ++i) {
      LabeledSequence s;
      s.label = static_cast<int>(detail::get_raw<std::uint32_t>(in));
      const auto idlen = detail::get_raw<std::uint32_t>(in);
      if (in.size() < idlen) throw Error(ErrorKind::BadHeader, "truncated prepared cache");
      s.id = std::string(in.substr(0, idlen));
      in.remove_prefix(idlen);
      const std::size_t count = kFeatureDim * ds.target_length;
      if (in.size() < count * sizeof(double)) throw Error(ErrorKind::BadHeader, "truncated prepared cache");
      s.sequence.x.resize(static_cast<Eigen::Index>(kFeatureDim),
                          static_cast<Eigen::Index>(ds.target_length));
      std::memcpy(s.sequence.x.data(), in.data(), count * sizeof(double));
      in.remove_prefix(count * sizeof(double));
      set->push_back(std::move(s));
    }
  }
  if (!in.empty()) throw Error(ErrorKind::BadHeader, "trailing bytes in prepared cache");
  return {std::move(ds), key};
}

}  // namespace hgr
