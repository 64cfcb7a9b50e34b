#pragma once

// Subcommands behind the `hgr` executable. Each takes a RunConfig, writes its
// artifacts under config.out and returns a summary; the executable only parses
// flags and maps errors to exit codes.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hgr/checkpoint.hpp"
#include "hgr/dataset.hpp"
#include "hgr/error.hpp"
#include "hgr/evaluation.hpp"
#include "hgr/gradcheck.hpp"
#include "hgr/network.hpp"
#include "hgr/synthetic.hpp"
#include "hgr/training.hpp"

namespace hgr {

inline constexpr const char* kArtifactVersion = "hgr-artifact v1";
inline constexpr const char* kDataRootEnv = "HGR_DATA_ROOT";

enum class ExitCode : int { Ok = 0, Usage = 1, Data = 2, Numeric = 3 };

inline ExitCode exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BadConfig: return ExitCode::Usage;
    case ErrorKind::NanLoss: return ExitCode::Numeric;
    default: return ExitCode::Data;
  }
}

/// Flat key=value run configuration. Unknown keys are rejected.
class RunConfig {
 public:
  RunConfig() {
    values_ = {
        {"kind", "synthetic"},      // shrec | native | synthetic
        {"root", ""},               // dataset root; falls back to $HGR_DATA_ROOT
        {"granularity", "14"},      // SHREC: 14 | 28
        {"gestures", ""},           // SHREC gesture subset, e.g. "1,2,5,6"
        {"merge", ""},              // label merges, e.g. "6+W=6W;2+V=2V"
        {"train_subjects", "14"},   // subject split for data without list files
        {"synth_classes", "4"},
        {"synth_subjects", "6"},
        {"synth_reps", "2"},
        {"synth_train_subjects", "4"},  // synthetic: subjects s00.. before this index train
        {"target_len", "200"},
        {"sg_window", "9"},
        {"sg_order", "3"},
        {"mask", "all"},
        {"layers", "4"},
        {"hidden", "200"},
        {"lr", "0.0001"},
        {"epochs", "800"},
        {"batch_size", "16"},
        {"shuffle", "1"},
        {"clip", "0"},              // 0 = off
        {"checkpoint_every", "0"},
        {"seed", "1"},
        {"out", "run"},
        {"cache_dir", ""},          // default <out>/cache
    };
  }

  static const std::vector<std::string>& keys() {
    static const std::vector<std::string> k = [] {
      std::vector<std::string> out;
      for (const auto& [key, v] : RunConfig().values_) out.push_back(key);
      return out;
    }();
    return k;
  }

  void set(const std::string& key, const std::string& value) {
    if (!values_.contains(key)) throw Error(ErrorKind::BadConfig, "unknown config key '" + key + "'");
    values_[key] = value;
  }

  const std::string& get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw Error(ErrorKind::BadConfig, "unknown config key '" + key + "'");
    return it->second;
  }

  long get_int(const std::string& key) const {
    const auto v = detail::parse_long(get(key));
    if (!v) throw Error(ErrorKind::BadConfig, key + " must be an integer, got '" + get(key) + "'");
    return *v;
  }
  double get_double(const std::string& key) const {
    const auto v = detail::parse_double(get(key));
    if (!v) throw Error(ErrorKind::BadConfig, key + " must be a number, got '" + get(key) + "'");
    return *v;
  }
  std::uint64_t seed() const {
    const long s = get_int("seed");
    if (s < 0) throw Error(ErrorKind::BadConfig, "seed must be non-negative");
    return static_cast<std::uint64_t>(s);
  }

  /// Reads `key = value` lines; '#' starts a comment.
  void merge_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    int n = 0;
    while (std::getline(is, line)) {
      ++n;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      const auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw Error(ErrorKind::BadConfig, "config line " + std::to_string(n) + " lacks '='");
      }
      set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
  }

  void merge_file(const std::string& path) { merge_text(detail::read_file(path)); }

  /// Canonical text: one `key = value` per line in key order.
  std::string to_text() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
    return out;
  }

  /// Hash over every key that can influence results (paths excluded).
  std::string hash() const {
    std::string canon;
    for (const auto& [k, v] : values_) {
      if (k == "out" || k == "cache_dir" || k == "root") continue;
      canon += k + "=" + v + "\n";
    }
    return hex64(fnv1a(canon));
  }

  std::string root() const {
    if (!get("root").empty()) return get("root");
    if (const char* env = std::getenv(kDataRootEnv)) return env;
    return {};
  }

  fs::path out_dir() const { return get("out"); }
  fs::path cache_dir() const {
    return get("cache_dir").empty() ? out_dir() / "cache" : fs::path(get("cache_dir"));
  }

  PrepareConfig prepare_config() const {
    PrepareConfig p;
    const long t = get_int("target_len");
    if (t < 1) throw Error(ErrorKind::BadConfig, "target_len must be >= 1");
    p.target_length = static_cast<std::size_t>(t);
    p.mask = FeatureMask::parse(get("mask"));
    p.seed = seed();
    p.sampling.sg_window = static_cast<int>(get_int("sg_window"));
    p.sampling.sg_order = static_cast<int>(get_int("sg_order"));
    if (p.sampling.sg_window < 1 || p.sampling.sg_window % 2 == 0 || p.sampling.sg_order < 0 ||
        p.sampling.sg_window <= p.sampling.sg_order) {
      throw Error(ErrorKind::BadConfig, "sg_window must be odd and > sg_order >= 0");
    }
    p.train_subjects = static_cast<std::size_t>(std::max(0L, get_int("train_subjects")));
    return p;
  }

  TrainConfig train_config() const {
    TrainConfig t;
    t.learning_rate = get_double("lr");
    t.epochs = static_cast<int>(get_int("epochs"));
    const long bs = get_int("batch_size");
    if (bs < 1) throw Error(ErrorKind::BadConfig, "batch_size must be >= 1");
    t.batch_size = static_cast<std::size_t>(bs);
    t.seed = mix_seed(seed(), 3);
    t.shuffle = get_int("shuffle") != 0;
    const double clip = get_double("clip");
    if (clip > 0.0) t.clip = clip;
    t.checkpoint_every = static_cast<int>(get_int("checkpoint_every"));
    if (!(t.learning_rate > 0.0)) throw Error(ErrorKind::BadConfig, "lr must be > 0");
    if (t.epochs < 0) throw Error(ErrorKind::BadConfig, "epochs must be >= 0");
    return t;
  }

  ModelDims model_dims(int classes) const {
    ModelDims d;
    d.hidden = static_cast<int>(get_int("hidden"));
    d.layers = static_cast<int>(get_int("layers"));
    d.classes = classes;
    if (d.hidden < 1 || d.layers < 1) throw Error(ErrorKind::BadConfig, "hidden and layers must be >= 1");
    return d;
  }

 private:
  std::map<std::string, std::string> values_;
};

inline std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto v = detail::parse_long(item);
    if (!v) throw Error(ErrorKind::BadConfig, "bad integer list '" + text + "'");
    out.push_back(static_cast<int>(*v));
  }
  return out;
}

/// Loads the raw dataset named by the config, with merge rules attached.
inline RawDataset load_dataset(const RunConfig& cfg) {
  const std::string kind = cfg.get("kind");
  RawDataset ds;
  if (kind == "synthetic") {
    SyntheticSpec spec;
    spec.classes = static_cast<int>(cfg.get_int("synth_classes"));
    spec.subjects = static_cast<int>(cfg.get_int("synth_subjects"));
    spec.repetitions = static_cast<int>(cfg.get_int("synth_reps"));
    spec.seed = cfg.seed();
    if (spec.classes < 1 || spec.subjects < 1 || spec.repetitions < 1) {
      throw Error(ErrorKind::BadConfig, "synthetic dataset sizes must be >= 1");
    }
    ds = make_synthetic_dataset(spec);
    const long train_subjects = cfg.get_int("synth_train_subjects");
    for (auto& e : ds.manifest.entries) {
      const int subject = std::stoi(e.subject.substr(1));
      e.split = subject < train_subjects ? Split::Train : Split::Test;
    }
  } else if (kind == "shrec" || kind == "native") {
    const std::string root = cfg.root();
    if (root.empty()) {
      throw Error(ErrorKind::BadConfig, "no dataset root (set root= or $" + std::string(kDataRootEnv) + ")");
    }
    if (kind == "shrec") {
      const long g = cfg.get_int("granularity");
      if (g != 14 && g != 28) throw Error(ErrorKind::BadConfig, "granularity must be 14 or 28");
      ds = load_shrec(root, g == 14 ? ShrecGranularity::Classes14 : ShrecGranularity::Classes28,
                      parse_int_list(cfg.get("gestures")));
    } else {
      ds = load_native_dir(root);
    }
  } else {
    throw Error(ErrorKind::BadConfig, "unknown dataset kind '" + kind + "'");
  }
  ds.manifest.merge_rules = parse_merge_rules(cfg.get("merge"));
  return ds;
}

namespace detail {

inline std::string artifact_header(const RunConfig& cfg, const std::string& what) {
  return "# " + std::string(kArtifactVersion) + " " + what + " config=" + cfg.hash() +
         " seed=" + cfg.get("seed") + "\n";
}

inline std::string num(double v) { return format_double(v); }

inline std::map<std::string, std::string> checkpoint_meta(const RunConfig& cfg,
                                                          const PreparedDataset& ds) {
  std::string labels;
  for (const auto& n : ds.label_names) labels += (labels.empty() ? "" : ",") + n;
  return {{"config_hash", cfg.hash()},
          {"seed", cfg.get("seed")},
          {"format", kArtifactVersion},
          {"target_len", std::to_string(ds.target_length)},
          {"labels", labels}};
}

}  // namespace detail

struct ExtractResult {
  PreparedDataset data;
  std::string key;
  fs::path cache_file;
  bool cache_hit = false;
  std::string summary;  // per-class sequence counts
};

inline std::string class_counts(const PreparedDataset& ds) {
  std::vector<std::size_t> tr(ds.label_names.size(), 0), te(ds.label_names.size(), 0);
  for (const auto& s : ds.train) ++tr[static_cast<std::size_t>(s.label)];
  for (const auto& s : ds.test) ++te[static_cast<std::size_t>(s.label)];
  std::ostringstream os;
  os << "class,train,test\n";
  for (std::size_t k = 0; k < ds.label_names.size(); ++k) {
    os << ds.label_names[k] << ',' << tr[k] << ',' << te[k] << '\n';
  }
  os << "total," << ds.train.size() << ',' << ds.test.size() << '\n';
  return os.str();
}

/// Prepares (or reloads from cache) the sampled train/test sets.
inline ExtractResult cmd_extract(const RunConfig& cfg) {
  const PrepareConfig pc = cfg.prepare_config();
  RawDataset raw = load_dataset(cfg);
  ExtractResult r;
  r.key = prepared_cache_key(raw.manifest, pc);
  fs::create_directories(cfg.cache_dir());
  r.cache_file = cfg.cache_dir() / ("prepared-" + r.key + ".bin");
  if (fs::exists(r.cache_file)) {
    auto [data, key] = deserialize_prepared(detail::read_file(r.cache_file));
    if (key == r.key) {
      r.data = std::move(data);
      r.cache_hit = true;
    }
  }
  if (!r.cache_hit) {
    r.data = prepare(raw.manifest, raw.sequences, pc);
    detail::write_file(r.cache_file, serialize_prepared(r.data, r.key));
  }
  r.summary = class_counts(r.data);
  return r;
}

struct TrainRunResult {
  fs::path run_dir;
  TrainResult training;
  PreparedDataset data;
  double final_train_acc = 0.0;
  double final_val_acc = 0.0;
};

inline std::string metrics_csv(const RunConfig& cfg, const std::vector<EpochMetrics>& history) {
  std::string out = detail::artifact_header(cfg, "metrics");
  out += "epoch,iterations,train_loss,train_loss_sum,train_acc,val_loss,val_acc\n";
  for (const auto& m : history) {
    out += std::to_string(m.epoch) + "," + std::to_string(m.iterations) + "," + detail::num(m.train_loss) +
           "," + detail::num(m.train_loss_sum) + "," + detail::num(m.train_acc) + "," +
           detail::num(m.val_loss) + "," + detail::num(m.val_acc) + "\n";
  }
  return out;
}

/// Trains on an already prepared dataset and writes the run directory.
inline TrainRunResult train_prepared(const RunConfig& cfg, PreparedDataset data, const fs::path& run_dir) {
  const TrainConfig tc = cfg.train_config();
  fs::create_directories(run_dir);
  detail::write_file(run_dir / "config.txt",
                     detail::artifact_header(cfg, "config") + cfg.to_text());
  if (data.train.empty()) throw Error(ErrorKind::EmptySequence, "training split is empty");

  const auto meta = detail::checkpoint_meta(cfg, data);
  DlstmModel model = DlstmModel::random(cfg.model_dims(data.classes()), mix_seed(cfg.seed(), 2));
  save_checkpoint((run_dir / "checkpoint_initial.ckpt").string(), model, meta);

  std::string timing = "epoch,wall_ms\n";
  auto observer = [&](const EpochMetrics& m, const DlstmModel& current) {
    timing += std::to_string(m.epoch) + "," + detail::num(m.wall_ms) + "\n";
    if (tc.checkpoint_every > 0 && m.epoch % tc.checkpoint_every == 0) {
      save_checkpoint((run_dir / ("checkpoint_epoch" + std::to_string(m.epoch) + ".ckpt")).string(),
                      current, meta);
    }
  };
  TrainRunResult r;
  r.run_dir = run_dir;
  r.training = train(model, data.train, data.test, tc, observer);
  detail::write_file(run_dir / "metrics.csv", metrics_csv(cfg, r.training.history));
  detail::write_file(run_dir / "timing.csv", timing);
  if (!r.training.history.empty()) {
    save_checkpoint((run_dir / "checkpoint_final.ckpt").string(), r.training.model, meta);
    save_checkpoint((run_dir / "checkpoint_best.ckpt").string(), r.training.best_model, meta);
    r.final_train_acc = r.training.history.back().train_acc;
    r.final_val_acc = r.training.history.back().val_acc;
  }
  r.data = std::move(data);
  return r;
}

inline TrainRunResult cmd_train(const RunConfig& cfg) {
  ExtractResult ex = cmd_extract(cfg);
  return train_prepared(cfg, std::move(ex.data), cfg.out_dir());
}

struct EvalRunResult {
  Evaluation evaluation;
  std::string metrics_text;
  std::vector<std::string> label_names;
};

inline std::string metrics_text(const RunConfig& cfg, const EvalReport& r,
                                const std::vector<std::string>& labels) {
  std::ostringstream os;
  os << detail::artifact_header(cfg, "eval");
  auto opt = [](const std::optional<double>& v) { return v ? detail::num(*v) : std::string("undefined"); };
  os << "sequences=" << r.confusion.total() << "\n";
  os << "accuracy=" << detail::num(r.accuracy) << "\n";
  os << "macro_precision=" << detail::num(r.macro_precision) << "\n";
  os << "macro_recall=" << detail::num(r.macro_recall) << "\n";
  os << "macro_f1=" << detail::num(r.macro_f1) << "\n";
  os << "micro_precision=" << detail::num(r.micro_precision) << "\n";
  os << "micro_recall=" << detail::num(r.micro_recall) << "\n";
  os << "micro_f1=" << detail::num(r.micro_f1) << "\n";
  for (std::size_t k = 0; k < r.per_class.size(); ++k) {
    const std::string name = k < labels.size() ? labels[k] : std::to_string(k);
    os << "class." << name << ".precision=" << opt(r.per_class[k].precision) << "\n";
    os << "class." << name << ".recall=" << opt(r.per_class[k].recall) << "\n";
    os << "class." << name << ".f1=" << opt(r.per_class[k].f1) << "\n";
  }
  return os.str();
}

inline void write_eval_artifacts(const RunConfig& cfg, const fs::path& dir, const Evaluation& ev,
                                 const std::vector<std::string>& labels) {
  fs::create_directories(dir);
  const std::string header = detail::artifact_header(cfg, "confusion");
  detail::write_file(dir / "metrics.txt", metrics_text(cfg, ev.report, labels));
  detail::write_file(dir / "confusion.csv", header + render_confusion(ev.report.confusion, false, labels).csv);
  detail::write_file(dir / "confusion_normalized.csv",
                     header + render_confusion(ev.report.confusion, true, labels).csv);
  std::string log = detail::artifact_header(cfg, "predictions") + "id,true,predicted,probs\n";
  for (const auto& p : ev.predictions) {
    log += p.id + "," + std::to_string(p.truth) + "," + std::to_string(p.predicted) + ",";
    for (Eigen::Index k = 0; k < p.probs.size(); ++k) log += (k ? " " : "") + detail::num(p.probs[k]);
    log += "\n";
  }
  detail::write_file(dir / "predictions.csv", log);
}

/// Evaluates a checkpoint on the test split (or, with use_train, the train
/// split) of the configured dataset.
inline EvalRunResult cmd_eval(const RunConfig& cfg, const std::string& checkpoint_path,
                              bool use_train = false) {
  const Checkpoint ck = load_checkpoint(checkpoint_path);
  ExtractResult ex = cmd_extract(cfg);
  const ModelDims& d = ck.model.dims();
  if (d.classes != ex.data.classes() || d.input != static_cast<int>(kFeatureDim)) {
    throw Error(ErrorKind::DimMismatch, "checkpoint K=" + std::to_string(d.classes) + " D=" +
                                            std::to_string(d.input) + " vs dataset K=" +
                                            std::to_string(ex.data.classes()) + " D=" +
                                            std::to_string(kFeatureDim));
  }
  if (const auto it = ck.meta.find("target_len");
      it != ck.meta.end() && it->second != std::to_string(ex.data.target_length)) {
    throw Error(ErrorKind::DimMismatch, "checkpoint T=" + it->second + " vs dataset T=" +
                                            std::to_string(ex.data.target_length));
  }
  const auto& set = use_train ? ex.data.train : ex.data.test;
  EvalRunResult r;
  r.evaluation = evaluate_detailed(ck.model, set);
  r.label_names = ex.data.label_names;
  r.metrics_text = metrics_text(cfg, r.evaluation.report, r.label_names);
  write_eval_artifacts(cfg, cfg.out_dir(), r.evaluation, r.label_names);
  return r;
}

struct AblationRow {
  std::string mask;
  EvalReport report;
};

/// One train+eval per mask with a shared seed; writes ablation.csv.
inline std::vector<AblationRow> cmd_ablate(const RunConfig& cfg, const std::vector<FeatureMask>& masks) {
  std::vector<AblationRow> rows;
  std::string csv = detail::artifact_header(cfg, "ablation") +
                    "mask,accuracy,macro_precision,macro_recall,macro_f1\n";
  for (const auto& mask : masks) {
    RunConfig sub = cfg;
    sub.set("mask", mask.to_string());
    sub.set("cache_dir", cfg.cache_dir().string());
    const fs::path dir = cfg.out_dir() / ("ablate_" + mask.to_string());
    sub.set("out", dir.string());
    TrainRunResult tr = cmd_train(sub);
    const Evaluation ev = evaluate_detailed(tr.training.model, tr.data.test);
    write_eval_artifacts(sub, dir / "eval", ev, tr.data.label_names);
    csv += mask.to_string() + "," + detail::num(ev.report.accuracy) + "," +
           detail::num(ev.report.macro_precision) + "," + detail::num(ev.report.macro_recall) + "," +
           detail::num(ev.report.macro_f1) + "\n";
    rows.push_back({mask.to_string(), ev.report});
  }
  fs::create_directories(cfg.out_dir());
  detail::write_file(cfg.out_dir() / "ablation.csv", csv);
  return rows;
}

inline std::string format_gradcheck(const GradcheckReport& r) {
  std::ostringstream os;
  char buf[160];
  for (const auto& t : r.tensors) {
    std::snprintf(buf, sizeof buf, "%-26s max_rel_err=%.3e  %s\n", t.name.c_str(), t.max_rel_error,
                  t.max_rel_error < r.tolerance ? "ok" : "FAIL");
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "overall max_rel_err=%.3e tolerance=%.1e -> %s\n", r.max_rel_error(),
                r.tolerance, r.passed ? "PASS" : "FAIL");
  os << buf;
  return os.str();
}

// ---------------------------------------------------------------------------
// plot: accuracy and loss curves from a metrics CSV as a standalone SVG.

struct MetricsSeries {
  std::vector<double> epoch, train_loss, val_loss, train_acc, val_acc;
};

inline MetricsSeries read_metrics_csv(const std::string& text) {
  MetricsSeries s;
  std::istringstream is(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<double> v;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      const auto d = detail::parse_double(cell);
      v.push_back(d ? *d : std::nan(""));
    }
    if (v.size() < 7) throw Error(ErrorKind::MalformedFrame, "metrics row has too few columns");
    s.epoch.push_back(v[0]);
    s.train_loss.push_back(v[2]);
    s.train_acc.push_back(v[4]);
    s.val_loss.push_back(v[5]);
    s.val_acc.push_back(v[6]);
  }
  return s;
}

inline std::string render_svg(const MetricsSeries& s) {
  const double w = 420, h = 260, pad = 40;
  auto panel = [&](double x0, const char* title, const std::vector<double>& a, const std::vector<double>& b) {
    double lo = 1e300, hi = -1e300;
    for (const auto* v : {&a, &b}) {
      for (double x : *v) {
        if (std::isfinite(x)) {
          lo = std::min(lo, x);
          hi = std::max(hi, x);
        }
      }
    }
    if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double e0 = s.epoch.empty() ? 0 : s.epoch.front();
    const double e1 = s.epoch.empty() ? 1 : std::max(s.epoch.back(), e0 + 1);
    std::ostringstream os;
    os << "<g transform=\"translate(" << x0 << ",0)\">";
    os << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << w - 2 * pad << "\" height=\""
       << h - 2 * pad << "\" fill=\"none\" stroke=\"#888\"/>";
    os << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>";
    char lab[64];
    std::snprintf(lab, sizeof lab, "%.3g", hi);
    os << "<text x=\"4\" y=\"" << pad + 4 << "\" font-size=\"10\">" << lab << "</text>";
    std::snprintf(lab, sizeof lab, "%.3g", lo);
    os << "<text x=\"4\" y=\"" << h - pad << "\" font-size=\"10\">" << lab << "</text>";
    auto line = [&](const std::vector<double>& v, const char* colour) {
      std::string pts;
      for (std::size_t k = 0; k < v.size(); ++k) {
        if (!std::isfinite(v[k])) continue;
        const double x = pad + (s.epoch[k] - e0) / (e1 - e0) * (w - 2 * pad);
        const double y = h - pad - (v[k] - lo) / (hi - lo) * (h - 2 * pad);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.2f,%.2f ", x, y);
        pts += buf;
      }
      if (!pts.empty()) {
        os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"" << pts
           << "\"/>";
      }
    };
    line(a, "#1f77b4");
    line(b, "#d62728");
    os << "</g>";
    return os.str();
  };
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << 2 * w << "\" height=\"" << h + 20 << "\">";
  svg << panel(0, "accuracy (blue train, red val)", s.train_acc, s.val_acc);
  svg << panel(w, "loss per sequence (blue train, red val)", s.train_loss, s.val_loss);
  svg << "</svg>\n";
  return svg.str();
}

inline void cmd_plot(const std::string& metrics_path, const std::string& svg_path) {
  detail::write_file(svg_path, render_svg(read_metrics_csv(detail::read_file(metrics_path))));
}

}  // namespace hgr
