#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "provq/config.hpp"
#include "provq/trainer.hpp"

namespace provq {

double mean(const std::vector<double>& values);
double sample_std(const std::vector<double>& values);

// Aggregated final hard-eval metrics of one variant across seeds.
struct VariantResult {
  Variant variant = Variant::kVanillaVq;
  std::vector<std::uint64_t> seeds;
  std::vector<double> mse;       // overall
  std::vector<double> mse_disk;
  std::vector<double> mse_tri;
  std::vector<double> pairwise_dist;
  std::vector<double> utilization;
  std::vector<double> perplexity;
  bool failed = false;
  std::string error;
};

struct CompareReport {
  std::vector<VariantResult> variants;
  std::size_t baseline = 0;  // index of vanilla_vq when present

  bool any_failed() const;
  // (base_mean - variant_mean) / base_mean * 100; 0 for the baseline itself.
  double improvement_mse_pct(std::size_t index) const;
  double improvement_disk_pct(std::size_t index) const;
  double improvement_tri_pct(std::size_t index) const;
};

struct CompareOptions {
  // When set, each variant x seed job writes metrics.csv into its own
  // subdirectory <out_dir>/<variant>_seed<seed>/.
  std::filesystem::path out_dir;
  // 0 = hardware concurrency; the PROVQ_THREADS env var caps either way.
  std::size_t max_threads = 0;
};

// Runs every variant x seed combination (possibly in parallel; runs share no
// mutable state) and aggregates the final hard-eval metrics.
CompareReport run_compare(const ExperimentConfig& base,
                          const std::vector<Variant>& variants,
                          const std::vector<std::uint64_t>& seeds,
                          const CompareOptions& options = {});

std::string compare_table(const CompareReport& report);
std::string compare_csv(const CompareReport& report);

}  // namespace provq
