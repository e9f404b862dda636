#include "provq/cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "provq/compare.hpp"
#include "provq/config.hpp"
#include "provq/csv.hpp"
#include "provq/errors.hpp"
#include "provq/serialize.hpp"
#include "provq/svg.hpp"
#include "provq/topodisc.hpp"
#include "provq/trainer.hpp"

namespace provq {

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

std::uint64_t parse_seed(const std::string& text) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError("cli: bad seed '" + text + "'");
  }
  return v;
}

ExperimentConfig load_config(const std::string& path,
                             const std::optional<std::uint64_t>& seed,
                             const std::optional<std::string>& variant) {
  ExperimentConfig cfg = parse_config_file(path);
  // Flag overrides win over file values.
  if (seed) cfg.seed = *seed;
  if (variant) cfg.variant = variant_from_string(*variant);
  cfg.validate();
  return cfg;
}

void print_final_summary(const MetricsRecord& m) {
  std::cout << "final: step=" << m.step << " stage=" << to_string(m.stage)
            << " mse=" << format_double(m.mse)
            << " mse_disk=" << format_double(m.mse_disk)
            << " mse_tri=" << format_double(m.mse_tri)
            << " mse_hard=" << format_double(m.mse_hard)
            << " perplexity=" << format_double(m.perplexity)
            << " utilization=" << format_double(m.utilization)
            << " pairdist=" << format_double(m.pairwise_dist) << '\n';
}

int cmd_train(const std::string& config_path, const std::string& out_dir,
              const std::optional<std::uint64_t>& seed,
              const std::optional<std::string>& variant,
              const std::string& dataset_out, const std::string& resume_path) {
  const ExperimentConfig cfg = load_config(config_path, seed, variant);
  fs::create_directories(out_dir);

  Trainer trainer = resume_path.empty()
                        ? Trainer(cfg)
                        : Trainer(cfg, load_train_state(resume_path));

  RunSink sink;
  sink.on_snapshot = [&](const Snapshot& snap) {
    save_snapshot(snap, fs::path(out_dir) /
                            ("snapshot_step" + std::to_string(snap.step) +
                             ".json"));
  };
  const RunResult result = trainer.run(&sink);

  write_metrics_csv(result.series, fs::path(out_dir) / "metrics.csv");
  save_train_state(trainer.export_state(), result.config_echo,
                   fs::path(out_dir) / "checkpoint.json");
  {
    std::ofstream echo(fs::path(out_dir) / "config_echo.ini");
    echo << result.config_echo;
  }
  if (!dataset_out.empty()) {
    save_topodisc_csv(trainer.dataset(), dataset_out);
  }

  print_final_summary(result.final_snapshot.metrics);
  return kExitOk;
}

int cmd_compare(const std::string& config_path, const std::string& out_dir,
                const std::optional<std::uint64_t>& seed,
                const std::string& variants_text,
                const std::string& seeds_text) {
  const ExperimentConfig base = load_config(config_path, seed, std::nullopt);

  std::vector<Variant> variants;
  for (const std::string& name : split_list(variants_text)) {
    variants.push_back(variant_from_string(name));
  }
  if (variants.size() < 2) {
    throw ConfigError("compare: need at least 2 variants, nothing to compare");
  }
  std::vector<std::uint64_t> seeds;
  for (const std::string& s : split_list(seeds_text)) {
    seeds.push_back(parse_seed(s));
  }
  if (seeds.empty()) throw ConfigError("compare: need at least 1 seed");

  fs::create_directories(out_dir);
  CompareOptions options;
  options.out_dir = out_dir;
  const CompareReport report = run_compare(base, variants, seeds, options);

  const std::string table = compare_table(report);
  std::cout << table;
  {
    std::ofstream out(fs::path(out_dir) / "compare.csv");
    if (!out) throw IoError("compare: cannot write compare.csv");
    out << compare_csv(report);
  }
  return report.any_failed() ? kExitRuntime : kExitOk;
}

int cmd_plot(const std::vector<std::string>& snapshot_paths,
             const std::string& out_dir) {
  std::vector<Snapshot> snapshots;
  snapshots.reserve(snapshot_paths.size());
  for (const std::string& path : snapshot_paths) {
    snapshots.push_back(load_snapshot(path));
  }

  const PlotBounds bounds = snapshot_bounds(snapshots);
  fs::create_directories(out_dir);
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    const fs::path in_path(snapshot_paths[i]);
    const fs::path out_path =
        fs::path(out_dir) / (in_path.stem().string() + ".svg");
    std::ofstream out(out_path);
    if (!out) throw IoError("plot: cannot write '" + out_path.string() + "'");
    out << render_snapshot_svg(snapshots[i], bounds);
    std::cout << "wrote " << out_path.string() << '\n';
  }
  return kExitOk;
}

int cmd_dataset(const std::string& config_path,
                const std::optional<std::uint64_t>& seed,
                const std::string& out_dir, std::string dataset_out) {
  ExperimentConfig cfg = load_config(config_path, std::nullopt, std::nullopt);
  if (seed) cfg.dataset.seed = *seed;

  const TopoDisc data = gen_topodisc(cfg.dataset);
  if (dataset_out.empty()) {
    fs::create_directories(out_dir);
    dataset_out = (fs::path(out_dir) / "topodisc.csv").string();
  }
  save_topodisc_csv(data, dataset_out);
  std::cout << "wrote " << data.size() << " points to " << dataset_out << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"ProVQ: curriculum vector quantization on the TopoDisc "
               "2D diagnostic"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "provq_out";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> variant;
  std::string dataset_out;
  std::string resume_path;
  std::string variants_text = "vanilla_vq,soft_only,provq";
  std::string seeds_text = "1,2,3,4,5";
  std::vector<std::string> snapshot_paths;

  CLI::App* train = app.add_subcommand("train", "Run one experiment");
  train->add_option("--config", config_path, "Experiment config file")
      ->required();
  train->add_option("--out", out_dir, "Output directory");
  train->add_option("--seed", seed, "Override the config seed");
  train->add_option("--variant", variant,
                    "Override the config variant "
                    "(vanilla_vq|soft_only|warmup_only|provq)");
  train->add_option("--dataset-out", dataset_out,
                    "Also export the dataset CSV to this path");
  train->add_option("--resume", resume_path, "Resume from a checkpoint file");

  CLI::App* compare =
      app.add_subcommand("compare", "Run variants x seeds and compare");
  compare->add_option("--config", config_path, "Experiment config file")
      ->required();
  compare->add_option("--out", out_dir, "Output directory");
  compare->add_option("--seed", seed, "Override the config seed");
  compare->add_option("--variants", variants_text,
                      "Comma-separated variant list");
  compare->add_option("--seeds", seeds_text, "Comma-separated seed list");

  CLI::App* plot =
      app.add_subcommand("plot", "Render snapshot JSONs as SVG scatter plots");
  plot->add_option("snapshots", snapshot_paths, "Snapshot JSON files")
      ->required();
  plot->add_option("--out", out_dir, "Output directory");

  CLI::App* dataset =
      app.add_subcommand("dataset", "Generate and export the TopoDisc CSV");
  dataset->add_option("--config", config_path, "Experiment config file")
      ->required();
  dataset->add_option("--out", out_dir, "Output directory");
  dataset->add_option("--seed", seed, "Override the dataset seed");
  dataset->add_option("--dataset-out", dataset_out,
                      "Dataset CSV path (default <out>/topodisc.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (train->parsed()) {
      return cmd_train(config_path, out_dir, seed, variant, dataset_out,
                       resume_path);
    }
    if (compare->parsed()) {
      return cmd_compare(config_path, out_dir, seed, variants_text,
                         seeds_text);
    }
    if (plot->parsed()) {
      return cmd_plot(snapshot_paths, out_dir);
    }
    return cmd_dataset(config_path, seed, out_dir, dataset_out);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace provq
