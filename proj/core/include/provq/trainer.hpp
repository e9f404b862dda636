#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "provq/adam.hpp"
#include "provq/codebook.hpp"
#include "provq/config.hpp"
#include "provq/metrics.hpp"
#include "provq/mlp.hpp"
#include "provq/schedule.hpp"
#include "provq/topodisc.hpp"

namespace provq {

inline constexpr int kSnapshotFormatVersion = 1;
inline constexpr int kCheckpointFormatVersion = 1;

struct LossBreakdown {
  double recon = 0.0;
  double vq = 0.0;
  double commit = 0.0;
  double total = 0.0;
};

// One full-dataset evaluation. MSE fields are reconstruction errors in the
// current stage's forward mode; mse_hard forces alpha = 0.
struct MetricsRecord {
  long step = 0;
  StageTag stage = StageTag::kWarmup;
  double alpha = 1.0;
  double omega = 0.0;
  LossBreakdown losses;
  double mse = 0.0;
  double mse_disk = 0.0;
  double mse_tri = 0.0;
  double mse_hard = 0.0;
  // Hard-eval split by mode; not CSV columns but used by compare reports.
  double mse_hard_disk = 0.0;
  double mse_hard_tri = 0.0;
  double perplexity = 0.0;
  double norm_perplexity = 0.0;
  double utilization = 0.0;
  double pairwise_dist = 0.0;
};

// Serialized training-time state at one step: enough to redraw the latent
// scatter (dataset, embeddings, codes, assignments) plus the metric block.
struct Snapshot {
  int format_version = kSnapshotFormatVersion;
  long step = 0;
  StageTag stage = StageTag::kWarmup;
  double alpha = 1.0;
  double omega = 0.0;
  LossBreakdown losses;
  MetricsRecord metrics;
  std::size_t d_lat = 0;
  std::vector<double> dataset_points;  // N x 2
  std::vector<Mode> dataset_modes;     // N
  std::vector<double> embeddings;      // N x d_lat
  std::vector<double> codebook;        // K x d_lat
  std::vector<int> assignments;        // N
};

// Everything needed to resume a run exactly where it stopped.
struct TrainState {
  int format_version = kCheckpointFormatVersion;
  long step = 0;
  std::vector<std::size_t> encoder_widths;
  std::vector<std::size_t> decoder_widths;
  std::vector<std::vector<double>> encoder_weights;
  std::vector<std::vector<double>> encoder_biases;
  std::vector<std::vector<double>> decoder_weights;
  std::vector<std::vector<double>> decoder_biases;
  std::size_t codebook_k = 0;
  std::size_t d_lat = 0;
  std::vector<double> codebook;
  long adam_steps = 0;
  std::vector<std::vector<double>> adam_m;
  std::vector<std::vector<double>> adam_v;
  std::string rng_train;
  std::vector<std::size_t> batch_order;
  std::size_t batch_cursor = 0;
};

struct RunResult {
  Snapshot final_snapshot;
  std::vector<MetricsRecord> series;
  std::string config_echo;
  double wall_seconds = 0.0;
};

// Optional observers for run(); called as eval rows and snapshots are made.
struct RunSink {
  std::function<void(const MetricsRecord&)> on_eval;
  std::function<void(const Snapshot&)> on_snapshot;
};

// Drives the staged pipeline on TopoDisc: warmup, k-means codebook init,
// cosine (or hard) soft transition, then fully hard quantization. One
// Trainer is single-threaded; independent Trainers share no mutable state.
class Trainer {
 public:
  explicit Trainer(const ExperimentConfig& config);
  Trainer(const ExperimentConfig& config, const TrainState& state);

  const ExperimentConfig& config() const { return cfg_; }
  const TopoDisc& dataset() const { return data_; }
  const Mlp& encoder() const { return encoder_; }
  const Mlp& decoder() const { return decoder_; }
  const Codebook& codebook() const { return codebook_; }
  const UsageHistogram& train_usage() const { return train_usage_; }
  long step() const { return step_; }

  // One optimizer step in the stage the global step falls in. Throws
  // NumericError on a non-finite loss, naming the last finite step.
  LossBreakdown train_step();

  // Full-dataset metrics in evaluation mode; never updates parameters.
  MetricsRecord evaluate();

  Snapshot make_snapshot();
  TrainState export_state() const;

  RunResult run(const RunSink* sink = nullptr);

 private:
  struct EvalPass;
  EvalPass eval_full();
  std::vector<std::size_t> next_batch();
  Tensor batch_inputs(const std::vector<std::size_t>& indices) const;
  void init_codebook_from_manifold();
  void build_fresh(const ExperimentConfig& config);

  ExperimentConfig cfg_;
  TopoDisc data_;
  Tensor inputs_;  // whole dataset, N x 2
  Mlp encoder_;
  Mlp decoder_;
  Codebook codebook_;
  AdamOptimizer optimizer_;
  UsageHistogram train_usage_{2};
  Rng rng_train_{0};
  std::vector<std::size_t> batch_order_;
  std::size_t batch_cursor_ = 0;
  long step_ = 0;
  long last_finite_step_ = -1;
};

RunResult run_experiment(const ExperimentConfig& config,
                         const RunSink* sink = nullptr);

}  // namespace provq
