#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "hgr/commands.hpp"

namespace {

struct ConfigFlags {
  std::string config_file;
  std::vector<std::string> assignments;  // --set key=value
  std::map<std::string, std::string> values;
};

void add_config_flags(CLI::App* app, ConfigFlags& flags) {
  app->add_option("--config", flags.config_file, "flat key=value config file")->check(CLI::ExistingFile);
  app->add_option("--set", flags.assignments, "override a config key (key=value)");
  for (const auto& key : hgr::RunConfig::keys()) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    app->add_option("--" + flag, flags.values[key], "config key " + key);
  }
}

hgr::RunConfig resolve(const CLI::App* app, const ConfigFlags& flags) {
  hgr::RunConfig cfg;
  if (!flags.config_file.empty()) cfg.merge_file(flags.config_file);
  for (const auto& [key, value] : flags.values) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (app->count("--" + flag) > 0) cfg.set(key, value);
  }
  for (const auto& a : flags.assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) throw hgr::Error(hgr::ErrorKind::BadConfig, "--set expects key=value");
    cfg.set(a.substr(0, eq), a.substr(eq + 1));
  }
  return cfg;
}

std::vector<hgr::FeatureMask> parse_masks(const std::string& text) {
  std::vector<hgr::FeatureMask> masks;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (!item.empty()) masks.push_back(hgr::FeatureMask::parse(item));
  }
  return masks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skeleton-based hand gesture recognition with a stacked peephole LSTM"};
  app.require_subcommand(1);

  ConfigFlags extract_flags, train_flags, eval_flags, ablate_flags;
  auto* extract = app.add_subcommand("extract", "prepare and cache sampled sequences");
  add_config_flags(extract, extract_flags);

  auto* train = app.add_subcommand("train", "train a model and write a run directory");
  add_config_flags(train, train_flags);

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on the test split");
  add_config_flags(eval, eval_flags);
  std::string checkpoint;
  bool on_train = false;
  eval->add_option("--checkpoint", checkpoint, "checkpoint file")->required()->check(CLI::ExistingFile);
  eval->add_flag("--on-train", on_train, "evaluate on the training split instead");

  auto* ablate = app.add_subcommand("ablate", "train and evaluate once per feature mask");
  add_config_flags(ablate, ablate_flags);
  std::string masks = "omega;beta;omega+beta";
  ablate->add_option("--masks", masks, "';'-separated masks, e.g. \"omega;beta;omega+beta\"");

  auto* gradcheck = app.add_subcommand("gradcheck", "compare analytic and numeric gradients");
  int gc_layers = 2, gc_hidden = 8, gc_classes = 4, gc_steps = 5;
  std::uint64_t gc_seed = 1;
  double gc_tol = 1e-4, gc_step = 1e-5;
  gradcheck->add_option("--layers", gc_layers);
  gradcheck->add_option("--hidden", gc_hidden);
  gradcheck->add_option("--classes", gc_classes);
  gradcheck->add_option("--steps", gc_steps, "sequence length");
  gradcheck->add_option("--seed", gc_seed);
  gradcheck->add_option("--tol", gc_tol);
  gradcheck->add_option("--fd-step", gc_step);

  auto* plot = app.add_subcommand("plot", "render accuracy/loss curves from metrics.csv as SVG");
  std::string metrics_path, svg_path = "curves.svg";
  plot->add_option("--metrics", metrics_path)->required()->check(CLI::ExistingFile);
  plot->add_option("--svg", svg_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(hgr::ExitCode::Usage);
  }

  try {
    if (extract->parsed()) {
      const auto r = hgr::cmd_extract(resolve(extract, extract_flags));
      std::cout << (r.cache_hit ? "cache hit: " : "cache written: ") << r.cache_file.string() << "\n"
                << "key=" << r.key << "\n"
                << r.summary;
    } else if (train->parsed()) {
      const auto cfg = resolve(train, train_flags);
      const auto r = hgr::cmd_train(cfg);
      std::cout << "run dir: " << r.run_dir.string() << "\n";
      if (!r.training.history.empty()) {
        std::cout << "final train_acc=" << r.final_train_acc << " val_acc=" << r.final_val_acc
                  << " best_epoch=" << r.training.best_epoch << "\n";
      }
    } else if (eval->parsed()) {
      const auto cfg = resolve(eval, eval_flags);
      const auto r = hgr::cmd_eval(cfg, checkpoint, on_train);
      std::cout << hgr::render_confusion(r.evaluation.report.confusion, false, r.label_names).text
                << "accuracy=" << r.evaluation.report.accuracy << "\n";
    } else if (ablate->parsed()) {
      const auto cfg = resolve(ablate, ablate_flags);
      const auto rows = hgr::cmd_ablate(cfg, parse_masks(masks));
      std::cout << "mask,accuracy\n";
      for (const auto& row : rows) std::cout << row.mask << "," << row.report.accuracy << "\n";
    } else if (gradcheck->parsed()) {
      hgr::ModelDims dims;
      dims.layers = gc_layers;
      dims.hidden = gc_hidden;
      dims.classes = gc_classes;
      const auto report = hgr::gradcheck(dims, gc_steps, gc_seed, gc_tol, 2, gc_step);
      std::cout << hgr::format_gradcheck(report);
      return report.passed ? 0 : static_cast<int>(hgr::ExitCode::Numeric);
    } else if (plot->parsed()) {
      hgr::cmd_plot(metrics_path, svg_path);
      std::cout << "wrote " << svg_path << "\n";
    }
  } catch (const hgr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(hgr::exit_code_for(e.kind()));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(hgr::ExitCode::Data);
  }
  return 0;
}
