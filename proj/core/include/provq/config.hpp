#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "provq/adam.hpp"
#include "provq/schedule.hpp"
#include "provq/topodisc.hpp"

namespace provq {

enum class Variant { kVanillaVq, kSoftOnly, kWarmupOnly, kProvq };

const char* to_string(Variant variant);
Variant variant_from_string(const std::string& text);

struct ModelConfig {
  std::vector<std::size_t> hidden{64, 64};
  std::size_t d_lat = 2;
};

struct QuantizerConfig {
  std::size_t codebook_size = 64;
  // Stddev of the random codebook used when no k-means init runs.
  double init_std = 0.1;
};

// Everything one training run needs. Parsed from a flat key=value file with
// [section] headers; see write_config for the full key set.
struct ExperimentConfig {
  TopoDiscConfig dataset;
  ModelConfig model;
  QuantizerConfig quantizer;
  Schedule schedule;
  Variant variant = Variant::kProvq;
  AdamConfig optimizer;
  long total_steps = 500;
  std::size_t batch_size = 675;
  long eval_every = 10;
  std::vector<long> snapshot_steps{0, 300, 500};
  std::uint64_t seed = 1;

  void validate() const;

  // Applies the variant's forced schedule settings:
  //   vanilla_vq:  t_warm = 0, hard scheduler, t_trans = 0
  //   soft_only:   t_warm = 0
  //   warmup_only: hard scheduler
  ExperimentConfig normalized() const;
};

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& origin);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

// Serializes every key; parse_config_text(write_config(c)) is equivalent
// to c.
std::string write_config(const ExperimentConfig& config);

}  // namespace provq
