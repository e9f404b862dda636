#include "provq/adam.hpp"

#include <cmath>

#include "provq/errors.hpp"

namespace provq {

void AdamOptimizer::add_param(std::string name, Tensor param) {
  AdamSlot slot;
  slot.name = std::move(name);
  slot.param = std::move(param);
  slot.m.assign(slot.param.numel(), 0.0);
  slot.v.assign(slot.param.numel(), 0.0);
  slots_.push_back(std::move(slot));
}

void AdamOptimizer::zero_grad() {
  for (AdamSlot& slot : slots_) slot.param.zero_grad();
}

void AdamOptimizer::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (AdamSlot& slot : slots_) {
    auto& p = slot.param.values();
    const auto& g = slot.param.grad();
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!std::isfinite(g[i])) {
        throw NumericError("adam: non-finite gradient for parameter '" +
                           slot.name + "'");
      }
      slot.m[i] = config_.beta1 * slot.m[i] + (1.0 - config_.beta1) * g[i];
      slot.v[i] =
          config_.beta2 * slot.v[i] + (1.0 - config_.beta2) * g[i] * g[i];
      const double m_hat = slot.m[i] / bc1;
      const double v_hat = slot.v[i] / bc2;
      p[i] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.eps);
    }
  }
}

void AdamOptimizer::restore(long step_count,
                            const std::vector<std::vector<double>>& m,
                            const std::vector<std::vector<double>>& v) {
  if (m.size() != slots_.size() || v.size() != slots_.size()) {
    throw ConfigError("adam: checkpoint has " + std::to_string(m.size()) +
                      " moment buffers, expected " +
                      std::to_string(slots_.size()));
  }
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (m[i].size() != slots_[i].m.size() ||
        v[i].size() != slots_[i].v.size()) {
      throw ConfigError("adam: checkpoint moment size mismatch for '" +
                        slots_[i].name + "'");
    }
    slots_[i].m = m[i];
    slots_[i].v = v[i];
  }
  t_ = step_count;
}

}  // namespace provq
