#pragma once

#include <functional>
#include <vector>

#include "provq/tensor.hpp"

namespace provq {

// Reverse-mode tape. Each differentiable op computes its forward value and
// appends one backward rule; backward() replays the rules in reverse
// execution order, accumulating into the grad slot of every requires_grad
// input reachable from the loss. A tape lives for exactly one optimizer
// step and is discarded afterwards.
class Tape {
 public:
  // input [N x d_in] * weights [d_in x d_out] + bias [d_out] broadcast.
  Tensor matmul_add(const Tensor& input, const Tensor& weights,
                    const Tensor& bias);
  Tensor tanh(const Tensor& input);
  Tensor add(const Tensor& a, const Tensor& b);
  Tensor sub(const Tensor& a, const Tensor& b);
  Tensor scale(const Tensor& input, double factor);
  Tensor sum(const Tensor& input);
  // Mean over all elements of the squared difference.
  Tensor mse(const Tensor& pred, const Tensor& target);
  // Identity forward, zero gradient backward.
  Tensor stop_gradient(const Tensor& input);
  // Row lookup into a K x d table; backward scatter-adds into the table.
  Tensor gather_rows(const Tensor& table, const std::vector<int>& indices);

  // Seeds the scalar loss gradient with 1 and replays the recorded rules.
  void backward(const Tensor& loss);

  void clear() { rules_.clear(); }
  std::size_t node_count() const { return rules_.size(); }

 private:
  void record(std::function<void()> rule) { rules_.push_back(std::move(rule)); }

  std::vector<std::function<void()>> rules_;
};

}  // namespace provq
