#pragma once

#include <string>
#include <vector>

#include "provq/tensor.hpp"

namespace provq {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamSlot {
  std::string name;
  Tensor param;
  std::vector<double> m;
  std::vector<double> v;
};

// Adam with bias correction, applied in place. step() throws NumericError
// naming the parameter when a gradient is non-finite.
class AdamOptimizer {
 public:
  AdamOptimizer() = default;
  explicit AdamOptimizer(AdamConfig config) : config_(config) {}

  void add_param(std::string name, Tensor param);
  void zero_grad();
  void step();

  long step_count() const { return t_; }
  const AdamConfig& config() const { return config_; }
  const std::vector<AdamSlot>& slots() const { return slots_; }

  // Restores moment buffers and the step counter from a checkpoint; slot
  // order and shapes must match the registered parameters.
  void restore(long step_count, const std::vector<std::vector<double>>& m,
               const std::vector<std::vector<double>>& v);

 private:
  AdamConfig config_;
  std::vector<AdamSlot> slots_;
  long t_ = 0;
};

}  // namespace provq
