#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

#include <sys/wait.h>

#include "hgr/commands.hpp"

using namespace hgr;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("hgr_cmd_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

RunConfig small_config(const fs::path& out) {
  RunConfig c;
  c.set("kind", "synthetic");
  c.set("synth_subjects", "3");
  c.set("synth_train_subjects", "2");
  c.set("layers", "1");
  c.set("hidden", "6");
  c.set("epochs", "3");
  c.set("batch_size", "4");
  c.set("target_len", "12");
  c.set("out", out.string());
  return c;
}

std::string slurp(const fs::path& p) { return detail::read_file(p); }

int run_cli(const std::string& args) {
  const int status = std::system((std::string(HGR_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(RunConfig, TextMergeAndErrors) {
  RunConfig c;
  c.merge_text("# comment\nhidden = 32\n\n  layers=2  # trailing\n");
  EXPECT_EQ(c.get_int("hidden"), 32);
  EXPECT_EQ(c.get_int("layers"), 2);
  EXPECT_THROW(c.merge_text("nonsense = 1\n"), Error);
  EXPECT_THROW(c.merge_text("hidden\n"), Error);
  c.set("lr", "abc");
  EXPECT_THROW(c.train_config(), Error);
}

TEST(RunConfig, CanonicalTextRoundTrips) {
  RunConfig a;
  a.set("hidden", "17");
  a.set("mask", "omega+gamma");
  RunConfig b;
  b.merge_text(a.to_text());
  EXPECT_EQ(a.to_text(), b.to_text());
  EXPECT_EQ(a.hash(), b.hash());
}

TEST(RunConfig, HashIgnoresPathsOnly) {
  RunConfig a, b;
  b.set("out", "/elsewhere");
  b.set("cache_dir", "/cache");
  EXPECT_EQ(a.hash(), b.hash());
  b.set("seed", "99");
  EXPECT_NE(a.hash(), b.hash());
}

TEST(RunConfig, Validation) {
  RunConfig c;
  c.set("sg_window", "8");
  EXPECT_THROW(c.prepare_config(), Error);
  c.set("sg_window", "9");
  c.set("batch_size", "0");
  EXPECT_THROW(c.train_config(), Error);
  c.set("batch_size", "1");
  c.set("lr", "0");
  EXPECT_THROW(c.train_config(), Error);
  EXPECT_EQ(exit_code_for(ErrorKind::BadConfig), ExitCode::Usage);
  EXPECT_EQ(exit_code_for(ErrorKind::MalformedFrame), ExitCode::Data);
  EXPECT_EQ(exit_code_for(ErrorKind::NanLoss), ExitCode::Numeric);
}

TEST(Extract, CacheWriteThenHit) {
  TempDir dir("extract");
  const RunConfig c = small_config(dir.path);
  const auto a = cmd_extract(c);
  EXPECT_FALSE(a.cache_hit);
  EXPECT_TRUE(fs::exists(a.cache_file));
  const auto b = cmd_extract(c);
  EXPECT_TRUE(b.cache_hit);
  EXPECT_EQ(serialize_prepared(a.data, a.key), serialize_prepared(b.data, b.key));
  EXPECT_NE(a.summary.find("c0,4,2"), std::string::npos) << a.summary;
  EXPECT_NE(a.summary.find("total,16,8"), std::string::npos) << a.summary;
}

TEST(Extract, BadShrecRoot) {
  TempDir dir("badroot");
  RunConfig c = small_config(dir.path);
  c.set("kind", "shrec");
  c.set("root", (dir.path / "nope").string());
  try {
    cmd_extract(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingListFile);
    EXPECT_NE(e.detail().find("nope"), std::string::npos);
  }
}

TEST(Train, RunDirectoryContents) {
  TempDir dir("train");
  RunConfig c = small_config(dir.path / "run");
  c.set("checkpoint_every", "2");
  const auto r = cmd_train(c);
  for (const char* f : {"config.txt", "metrics.csv", "timing.csv", "checkpoint_initial.ckpt",
                        "checkpoint_final.ckpt", "checkpoint_best.ckpt", "checkpoint_epoch2.ckpt"}) {
    EXPECT_TRUE(fs::exists(r.run_dir / f)) << f;
  }
  const std::string metrics = slurp(r.run_dir / "metrics.csv");
  EXPECT_EQ(metrics.rfind("# hgr-artifact v1 metrics config=" + c.hash() + " seed=1\n", 0), 0u);
  EXPECT_EQ(std::count(metrics.begin(), metrics.end(), '\n'), 2 + 3);
  const Checkpoint ck = load_checkpoint((r.run_dir / "checkpoint_final.ckpt").string());
  EXPECT_EQ(ck.meta.at("config_hash"), c.hash());
  EXPECT_EQ(ck.meta.at("seed"), "1");
  EXPECT_EQ(ck.model, r.training.model);
  RunConfig reread;
  const std::string cfg_text = slurp(r.run_dir / "config.txt");
  reread.merge_text(cfg_text);
  EXPECT_EQ(reread.hash(), c.hash());
}

TEST(Train, ZeroEpochsInitialCheckpointOnly) {
  TempDir dir("train0");
  RunConfig c = small_config(dir.path / "run");
  c.set("epochs", "0");
  cmd_train(c);
  std::vector<std::string> ckpts;
  for (const auto& e : fs::directory_iterator(dir.path / "run"))
    if (e.path().extension() == ".ckpt") ckpts.push_back(e.path().filename().string());
  EXPECT_EQ(ckpts, (std::vector<std::string>{"checkpoint_initial.ckpt"}));
}

TEST(Train, SameConfigSameBytes) {
  TempDir dir("determinism");
  const auto a = cmd_train(small_config(dir.path / "a"));
  const auto b = cmd_train(small_config(dir.path / "b"));
  for (const char* f : {"metrics.csv", "checkpoint_final.ckpt", "checkpoint_best.ckpt",
                        "checkpoint_initial.ckpt"}) {
    EXPECT_EQ(slurp(a.run_dir / f), slurp(b.run_dir / f)) << f;
  }
}

TEST(Eval, DimMismatchNamesBothClassCounts) {
  TempDir dir("evalmismatch");
  RunConfig c = small_config(dir.path / "run");
  c.set("synth_classes", "4");
  cmd_train(c);
  RunConfig e = small_config(dir.path / "eval");
  e.set("synth_classes", "3");
  try {
    cmd_eval(e, (dir.path / "run" / "checkpoint_final.ckpt").string());
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::DimMismatch);
    EXPECT_NE(err.detail().find("K=4"), std::string::npos);
    EXPECT_NE(err.detail().find("K=3"), std::string::npos);
  }
}

TEST(Eval, MemorisedTrainSetAndStableReport) {
  TempDir dir("evalmem");
  RunConfig c = small_config(dir.path / "run");
  c.set("hidden", "16");
  c.set("epochs", "40");
  c.set("target_len", "30");
  const auto tr = cmd_train(c);
  ASSERT_EQ(tr.final_train_acc, 1.0);
  RunConfig e = c;
  e.set("out", (dir.path / "eval1").string());
  e.set("cache_dir", (dir.path / "run" / "cache").string());
  const auto r = cmd_eval(e, (tr.run_dir / "checkpoint_final.ckpt").string(), true);
  EXPECT_EQ(r.evaluation.report.accuracy, 1.0);
  e.set("out", (dir.path / "eval2").string());
  cmd_eval(e, (tr.run_dir / "checkpoint_final.ckpt").string(), true);
  for (const char* f : {"metrics.txt", "confusion.csv", "confusion_normalized.csv", "predictions.csv"}) {
    EXPECT_EQ(slurp(dir.path / "eval1" / f), slurp(dir.path / "eval2" / f)) << f;
  }
  EXPECT_NE(slurp(dir.path / "eval1" / "metrics.txt").find("accuracy=1\n"), std::string::npos);
}

TEST(Ablate, EmptyListEmptyTable) {
  TempDir dir("ablate0");
  const auto rows = cmd_ablate(small_config(dir.path), {});
  EXPECT_TRUE(rows.empty());
  const std::string csv = slurp(dir.path / "ablation.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
}

TEST(Ablate, SingleMaskMatchesTrainThenEval) {
  TempDir dir("ablate1");
  const RunConfig c = small_config(dir.path / "ab");
  const auto rows = cmd_ablate(c, {FeatureMask::parse("omega+beta")});
  ASSERT_EQ(rows.size(), 1u);
  RunConfig t = small_config(dir.path / "direct");
  t.set("mask", "omega+beta");
  const auto tr = cmd_train(t);
  const EvalReport direct = evaluate(tr.training.model, tr.data.test);
  EXPECT_EQ(rows[0].report.accuracy, direct.accuracy);
  EXPECT_EQ(rows[0].report.macro_f1, direct.macro_f1);
  EXPECT_EQ(rows[0].report.confusion, direct.confusion);
  const std::string csv = slurp(dir.path / "ab" / "ablation.csv");
  EXPECT_NE(csv.find("\nomega+beta,"), std::string::npos) << csv;
}

TEST(Plot, WritesSvg) {
  TempDir dir("plot");
  const auto r = cmd_train(small_config(dir.path / "run"));
  cmd_plot((r.run_dir / "metrics.csv").string(), (dir.path / "c.svg").string());
  const std::string svg = slurp(dir.path / "c.svg");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("<polyline"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  TempDir dir("cli");
  const std::string out = " --out " + (dir.path / "r").string();
  EXPECT_EQ(run_cli("train --no-such-flag"), 1);
  EXPECT_EQ(run_cli("train --set bogus=1" + out), 1);
  EXPECT_EQ(run_cli("extract --kind shrec --root " + (dir.path / "missing").string() + out), 2);
  EXPECT_EQ(run_cli("train --layers 1 --hidden 3 --epochs 1 --target-len 5 --synth-subjects 3 "
                    "--synth-train-subjects 2" + out),
            0);
  EXPECT_EQ(run_cli("gradcheck --layers 1 --hidden 3 --classes 2 --steps 3"), 0);
}

TEST(Cli, NanLossExitsThree) {
  TempDir dir("nan");
  // A learning rate this large drives the parameters to overflow within a few steps.
  EXPECT_EQ(run_cli("train --layers 1 --hidden 4 --epochs 50 --target-len 20 --lr 1e308 --out " +
                    (dir.path / "r").string()),
            3);
}
