#include "provq/metrics.hpp"

#include <cmath>

#include "provq/errors.hpp"

namespace provq {

void UsageHistogram::add(int index) {
  if (index < 0 || static_cast<std::size_t>(index) >= counts_.size()) {
    throw Error("usage histogram: index " + std::to_string(index) +
                " out of range for K=" + std::to_string(counts_.size()));
  }
  ++counts_[static_cast<std::size_t>(index)];
  ++total_;
}

void UsageHistogram::add(const std::vector<int>& indices) {
  for (int i : indices) add(i);
}

void UsageHistogram::reset() {
  std::fill(counts_.begin(), counts_.end(), 0);
  total_ = 0;
}

double perplexity(const UsageHistogram& hist) {
  if (hist.total() == 0) {
    throw ConfigError("perplexity: empty usage histogram");
  }
  const double total = static_cast<double>(hist.total());
  double entropy = 0.0;
  for (std::uint64_t c : hist.counts()) {
    if (c == 0) continue;  // 0 * ln 0 := 0
    const double p = static_cast<double>(c) / total;
    entropy -= p * std::log(p);
  }
  return std::exp(entropy);
}

double utilization(const UsageHistogram& hist) {
  if (hist.total() == 0) {
    throw ConfigError("utilization: empty usage histogram");
  }
  std::size_t used = 0;
  for (std::uint64_t c : hist.counts()) {
    if (c > 0) ++used;
  }
  return static_cast<double>(used) / static_cast<double>(hist.size());
}

double mean_pairwise_distance(const Codebook& codebook) {
  const std::size_t k = codebook.size();
  if (k < 2) {
    throw ConfigError("mean_pairwise_distance: needs K >= 2 codes");
  }
  const std::size_t d = codebook.dim();
  const auto& v = codebook.codes.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      double dist2 = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        const double diff = v[i * d + c] - v[j * d + c];
        dist2 += diff * diff;
      }
      acc += std::sqrt(dist2);
    }
  }
  const double pairs = 0.5 * static_cast<double>(k) *
                       static_cast<double>(k - 1);
  return acc / pairs;
}

}  // namespace provq
