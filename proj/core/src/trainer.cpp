#include "provq/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <set>

#include "provq/errors.hpp"
#include "provq/quantizer.hpp"
#include "provq/tape.hpp"

namespace provq {

namespace {

// Substream tags for the per-purpose RNGs derived from the experiment seed.
constexpr std::uint32_t kStreamModel = 1;
constexpr std::uint32_t kStreamCodebook = 2;
constexpr std::uint32_t kStreamTrain = 3;
constexpr std::uint32_t kStreamKMeans = 4;

std::vector<std::size_t> encoder_widths(const ModelConfig& model) {
  std::vector<std::size_t> widths{2};
  widths.insert(widths.end(), model.hidden.begin(), model.hidden.end());
  widths.push_back(model.d_lat);
  return widths;
}

std::vector<std::size_t> decoder_widths(const ModelConfig& model) {
  std::vector<std::size_t> widths{model.d_lat};
  widths.insert(widths.end(), model.hidden.begin(), model.hidden.end());
  widths.push_back(2);
  return widths;
}

void register_mlp(AdamOptimizer& opt, const std::string& prefix, Mlp& mlp) {
  for (std::size_t l = 0; l < mlp.layers().size(); ++l) {
    const std::string base = prefix + ".layer" + std::to_string(l);
    opt.add_param(base + ".weights", mlp.layers()[l].weights);
    opt.add_param(base + ".bias", mlp.layers()[l].bias);
  }
}

std::vector<std::vector<double>> copy_layer_values(const Mlp& mlp,
                                                   bool weights) {
  std::vector<std::vector<double>> out;
  out.reserve(mlp.layers().size());
  for (const DenseLayer& layer : mlp.layers()) {
    out.push_back(weights ? layer.weights.values() : layer.bias.values());
  }
  return out;
}

void restore_layer_values(Mlp& mlp, const std::vector<std::vector<double>>& w,
                          const std::vector<std::vector<double>>& b,
                          const char* which) {
  if (w.size() != mlp.layers().size() || b.size() != mlp.layers().size()) {
    throw ConfigError(std::string("checkpoint: ") + which +
                      " layer count does not match the config");
  }
  for (std::size_t l = 0; l < mlp.layers().size(); ++l) {
    if (w[l].size() != mlp.layers()[l].weights.numel() ||
        b[l].size() != mlp.layers()[l].bias.numel()) {
      throw ConfigError(std::string("checkpoint: ") + which + " layer " +
                        std::to_string(l) + " shape does not match the config");
    }
    mlp.layers()[l].weights.values() = w[l];
    mlp.layers()[l].bias.values() = b[l];
  }
}

}  // namespace

struct Trainer::EvalPass {
  MetricsRecord record;
  std::vector<double> embeddings;
  std::vector<int> assignments;
};

void Trainer::build_fresh(const ExperimentConfig& config) {
  cfg_ = config.normalized();
  cfg_.validate();

  data_ = gen_topodisc(cfg_.dataset);
  if (cfg_.batch_size > data_.size()) cfg_.batch_size = data_.size();
  inputs_ = Tensor::matrix(data_.size(), 2, data_.points);

  Rng rng_model(cfg_.seed, kStreamModel);
  encoder_ = Mlp(encoder_widths(cfg_.model), rng_model);
  decoder_ = Mlp(decoder_widths(cfg_.model), rng_model);

  Rng rng_codebook(cfg_.seed, kStreamCodebook);
  codebook_ = Codebook::gaussian(cfg_.quantizer.codebook_size,
                                 cfg_.model.d_lat, cfg_.quantizer.init_std,
                                 rng_codebook);

  optimizer_ = AdamOptimizer(cfg_.optimizer);
  register_mlp(optimizer_, "encoder", encoder_);
  register_mlp(optimizer_, "decoder", decoder_);
  optimizer_.add_param("codebook", codebook_.codes);

  train_usage_ = UsageHistogram(cfg_.quantizer.codebook_size);
  rng_train_ = Rng(cfg_.seed, kStreamTrain);
  batch_order_.clear();
  batch_cursor_ = 0;
  step_ = 0;
  last_finite_step_ = -1;
}

Trainer::Trainer(const ExperimentConfig& config) { build_fresh(config); }

Trainer::Trainer(const ExperimentConfig& config, const TrainState& state) {
  build_fresh(config);
  if (state.format_version != kCheckpointFormatVersion) {
    throw ConfigError("checkpoint: format_version " +
                      std::to_string(state.format_version) + ", expected " +
                      std::to_string(kCheckpointFormatVersion));
  }
  if (state.encoder_widths != encoder_.widths() ||
      state.decoder_widths != decoder_.widths()) {
    throw ConfigError("checkpoint: model widths do not match the config");
  }
  if (state.codebook_k != codebook_.size() ||
      state.d_lat != codebook_.dim() ||
      state.codebook.size() != codebook_.codes.numel()) {
    throw ConfigError("checkpoint: codebook shape does not match the config");
  }
  restore_layer_values(encoder_, state.encoder_weights, state.encoder_biases,
                       "encoder");
  restore_layer_values(decoder_, state.decoder_weights, state.decoder_biases,
                       "decoder");
  codebook_.codes.values() = state.codebook;
  optimizer_.restore(state.adam_steps, state.adam_m, state.adam_v);
  rng_train_.deserialize(state.rng_train);
  batch_order_ = state.batch_order;
  batch_cursor_ = state.batch_cursor;
  step_ = state.step;
  last_finite_step_ = state.step - 1;
}

std::vector<std::size_t> Trainer::next_batch() {
  const std::size_t n = data_.size();
  if (cfg_.batch_size >= n) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  if (batch_cursor_ >= batch_order_.size()) {
    batch_order_.resize(n);
    std::iota(batch_order_.begin(), batch_order_.end(), 0);
    rng_train_.shuffle(batch_order_);
    batch_cursor_ = 0;
  }
  const std::size_t take = std::min(cfg_.batch_size, n - batch_cursor_);
  std::vector<std::size_t> batch(batch_order_.begin() + batch_cursor_,
                                 batch_order_.begin() + batch_cursor_ + take);
  batch_cursor_ += take;
  return batch;
}

Tensor Trainer::batch_inputs(const std::vector<std::size_t>& indices) const {
  if (indices.size() == data_.size()) return inputs_;
  std::vector<double> values(indices.size() * 2);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    values[2 * i] = data_.points[2 * indices[i]];
    values[2 * i + 1] = data_.points[2 * indices[i] + 1];
  }
  return Tensor::matrix(indices.size(), 2, std::move(values));
}

void Trainer::init_codebook_from_manifold() {
  Tape tape;
  const Tensor z = encoder_.forward(tape, inputs_);
  Rng rng(cfg_.seed, kStreamKMeans);
  const Codebook init = kmeans_init(z, codebook_.size(), rng);
  // Replace values in place so the optimizer registration stays valid; the
  // Adam moments are still zero because the codebook saw no gradient yet.
  codebook_.codes.values() = init.codes.values();
}

LossBreakdown Trainer::train_step() {
  const Stage stage = stage_of(step_, cfg_.schedule);
  const std::vector<std::size_t> indices = next_batch();
  const Tensor x = batch_inputs(indices);

  Tape tape;
  const Tensor z = encoder_.forward(tape, x);

  LossBreakdown out;
  Tensor total;
  if (stage.tag == StageTag::kWarmup) {
    const Tensor x_hat = decoder_.forward(tape, z);
    total = tape.mse(x_hat, x);
    out.recon = total.item();
    out.total = out.recon;
  } else {
    const double alpha = stage.tag == StageTag::kTransition
                             ? alpha_at(stage.step_in_stage, cfg_.schedule)
                             : 0.0;
    const double omega = omega_at(alpha, cfg_.schedule.lambda);
    const Quantized q = quantize_ste(tape, z, codebook_);
    const Tensor z_tilde = blend(tape, z, q.z_q, alpha);
    const Tensor x_hat = decoder_.forward(tape, z_tilde);
    const Tensor recon = tape.mse(x_hat, x);
    const Tensor vq = vq_loss(tape, z, codebook_, q.indices);
    const Tensor commit = commit_loss(tape, z, codebook_, q.indices);
    total = tape.add(
        recon,
        tape.scale(tape.add(vq, tape.scale(commit, cfg_.schedule.beta)),
                   omega));
    out.recon = recon.item();
    out.vq = vq.item();
    out.commit = commit.item();
    out.total = total.item();
    train_usage_.add(q.indices);
  }

  if (!std::isfinite(out.total)) {
    throw NumericError("trainer: non-finite loss at step " +
                       std::to_string(step_) + " (last finite step " +
                       std::to_string(last_finite_step_) + ")");
  }

  optimizer_.zero_grad();
  tape.backward(total);
  optimizer_.step();
  last_finite_step_ = step_;
  ++step_;

  if (cfg_.schedule.t_warm > 0 && step_ == cfg_.schedule.t_warm) {
    init_codebook_from_manifold();
  }
  return out;
}

Trainer::EvalPass Trainer::eval_full() {
  const Stage stage = stage_of(step_, cfg_.schedule);
  const double alpha = stage.tag == StageTag::kWarmup ? 1.0
                       : stage.tag == StageTag::kTransition
                           ? alpha_at(stage.step_in_stage, cfg_.schedule)
                           : 0.0;
  const double omega = stage.tag == StageTag::kWarmup
                           ? 0.0
                           : omega_at(alpha, cfg_.schedule.lambda);

  Tape tape;  // evaluation tape, discarded without an optimizer step
  const Tensor z = encoder_.forward(tape, inputs_);
  const Quantized q = quantize_ste(tape, z, codebook_);

  Tensor x_hat;
  if (stage.tag == StageTag::kWarmup) {
    x_hat = decoder_.forward(tape, z);
  } else {
    x_hat = decoder_.forward(tape, blend(tape, z, q.z_q, alpha));
  }
  const Tensor x_hat_hard = decoder_.forward(tape, q.z_q);

  const auto& xs = inputs_.values();
  const auto& soft = x_hat.values();
  const auto& hard = x_hat_hard.values();
  double sum_disk = 0.0;
  double sum_tri = 0.0;
  double sum_hard_disk = 0.0;
  double sum_hard_tri = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    double se = 0.0;
    double se_hard = 0.0;
    for (std::size_t j = 0; j < 2; ++j) {
      const double ds = soft[2 * i + j] - xs[2 * i + j];
      const double dh = hard[2 * i + j] - xs[2 * i + j];
      se += ds * ds;
      se_hard += dh * dh;
    }
    if (data_.modes[i] == Mode::kDisk) {
      sum_disk += se;
      sum_hard_disk += se_hard;
    } else {
      sum_tri += se;
      sum_hard_tri += se_hard;
    }
  }
  const auto n_disk = static_cast<double>(data_.count(Mode::kDisk));
  const auto n_tri = static_cast<double>(data_.count(Mode::kTriangle));
  const auto n_all = static_cast<double>(data_.size());

  EvalPass pass;
  MetricsRecord& rec = pass.record;
  rec.step = step_;
  rec.stage = stage.tag;
  rec.alpha = alpha;
  rec.omega = omega;
  rec.mse = (sum_disk + sum_tri) / (n_all * 2.0);
  rec.mse_disk = n_disk > 0.0 ? sum_disk / (n_disk * 2.0) : 0.0;
  rec.mse_tri = n_tri > 0.0 ? sum_tri / (n_tri * 2.0) : 0.0;
  rec.mse_hard = (sum_hard_disk + sum_hard_tri) / (n_all * 2.0);
  rec.mse_hard_disk = n_disk > 0.0 ? sum_hard_disk / (n_disk * 2.0) : 0.0;
  rec.mse_hard_tri = n_tri > 0.0 ? sum_hard_tri / (n_tri * 2.0) : 0.0;

  rec.losses.recon = rec.mse;
  if (stage.tag != StageTag::kWarmup) {
    Tape loss_tape;
    rec.losses.vq = vq_loss(loss_tape, z, codebook_, q.indices).item();
    rec.losses.commit =
        commit_loss(loss_tape, z, codebook_, q.indices).item();
  }
  rec.losses.total =
      rec.losses.recon +
      omega * (rec.losses.vq + cfg_.schedule.beta * rec.losses.commit);

  UsageHistogram hist(codebook_.size());
  hist.add(q.indices);
  rec.perplexity = perplexity(hist);
  rec.norm_perplexity =
      rec.perplexity / static_cast<double>(codebook_.size());
  rec.utilization = utilization(hist);
  rec.pairwise_dist = mean_pairwise_distance(codebook_);

  pass.embeddings = z.values();
  pass.assignments = q.indices;
  return pass;
}

MetricsRecord Trainer::evaluate() { return eval_full().record; }

Snapshot Trainer::make_snapshot() {
  EvalPass pass = eval_full();
  Snapshot snap;
  snap.step = step_;
  snap.stage = pass.record.stage;
  snap.alpha = pass.record.alpha;
  snap.omega = pass.record.omega;
  snap.losses = pass.record.losses;
  snap.metrics = pass.record;
  snap.d_lat = codebook_.dim();
  snap.dataset_points = data_.points;
  snap.dataset_modes = data_.modes;
  snap.embeddings = std::move(pass.embeddings);
  snap.codebook = codebook_.codes.values();
  snap.assignments = std::move(pass.assignments);
  return snap;
}

TrainState Trainer::export_state() const {
  TrainState state;
  state.step = step_;
  state.encoder_widths = encoder_.widths();
  state.decoder_widths = decoder_.widths();
  state.encoder_weights = copy_layer_values(encoder_, true);
  state.encoder_biases = copy_layer_values(encoder_, false);
  state.decoder_weights = copy_layer_values(decoder_, true);
  state.decoder_biases = copy_layer_values(decoder_, false);
  state.codebook_k = codebook_.size();
  state.d_lat = codebook_.dim();
  state.codebook = codebook_.codes.values();
  state.adam_steps = optimizer_.step_count();
  for (const AdamSlot& slot : optimizer_.slots()) {
    state.adam_m.push_back(slot.m);
    state.adam_v.push_back(slot.v);
  }
  state.rng_train = rng_train_.serialize();
  state.batch_order = batch_order_;
  state.batch_cursor = batch_cursor_;
  return state;
}

RunResult Trainer::run(const RunSink* sink) {
  const auto t0 = std::chrono::steady_clock::now();
  RunResult result;
  result.config_echo = write_config(cfg_);

  const std::set<long> snapshot_at(cfg_.snapshot_steps.begin(),
                                   cfg_.snapshot_steps.end());
  for (long s = step_;; ++s) {
    if (s % cfg_.eval_every == 0 || s == cfg_.total_steps) {
      MetricsRecord rec = evaluate();
      result.series.push_back(rec);
      if (sink && sink->on_eval) sink->on_eval(rec);
    }
    if (snapshot_at.count(s) > 0) {
      Snapshot snap = make_snapshot();
      if (sink && sink->on_snapshot) sink->on_snapshot(snap);
    }
    if (s >= cfg_.total_steps) break;
    train_step();
  }

  result.final_snapshot = make_snapshot();
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

RunResult run_experiment(const ExperimentConfig& config, const RunSink* sink) {
  Trainer trainer(config);
  return trainer.run(sink);
}

}  // namespace provq
