#pragma once

#include <cstdint>
#include <vector>

#include "provq/codebook.hpp"

namespace provq {

// Code-usage counts over one evaluation pass; reset between passes.
class UsageHistogram {
 public:
  explicit UsageHistogram(std::size_t k) : counts_(k, 0) {}

  void add(int index);
  void add(const std::vector<int>& indices);
  void reset();

  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::uint64_t total() const { return total_; }
  std::size_t size() const { return counts_.size(); }

 private:
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

// exp of the entropy of usage frequencies; K under perfectly uniform usage.
double perplexity(const UsageHistogram& hist);

// Fraction of codes assigned at least once.
double utilization(const UsageHistogram& hist);

// Mean Euclidean distance over all K(K-1)/2 unordered code pairs, exact.
double mean_pairwise_distance(const Codebook& codebook);

}  // namespace provq
