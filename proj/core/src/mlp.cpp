#include "provq/mlp.hpp"

#include <cmath>

#include "provq/errors.hpp"

namespace provq {

Mlp::Mlp(const std::vector<std::size_t>& widths, Rng& rng) {
  if (widths.size() < 2) {
    throw ConfigError("mlp: need at least input and output widths, got " +
                      std::to_string(widths.size()));
  }
  for (std::size_t w : widths) {
    if (w == 0) throw ConfigError("mlp: zero layer width");
  }
  layers_.reserve(widths.size() - 1);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const std::size_t fan_in = widths[l];
    const std::size_t fan_out = widths[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::vector<double> w(fan_in * fan_out);
    for (double& v : w) v = rng.uniform(-bound, bound);

    DenseLayer layer;
    layer.weights = Tensor::matrix(fan_in, fan_out, std::move(w), true);
    layer.bias = Tensor::zeros({fan_out}, true);
    // Last layer is identity; hidden layers are tanh.
    layer.activation =
        (l + 2 == widths.size()) ? Activation::kIdentity : Activation::kTanh;
    layers_.push_back(std::move(layer));
  }
}

Tensor Mlp::forward(Tape& tape, const Tensor& input) const {
  Tensor h = input;
  for (const DenseLayer& layer : layers_) {
    h = tape.matmul_add(h, layer.weights, layer.bias);
    if (layer.activation == Activation::kTanh) h = tape.tanh(h);
  }
  return h;
}

std::vector<std::size_t> Mlp::widths() const {
  std::vector<std::size_t> out;
  if (layers_.empty()) return out;
  out.push_back(layers_.front().weights.rows());
  for (const DenseLayer& layer : layers_) out.push_back(layer.weights.cols());
  return out;
}

Mlp Mlp::clone() const {
  Mlp copy;
  copy.layers_.reserve(layers_.size());
  for (const DenseLayer& layer : layers_) {
    DenseLayer c;
    c.weights = layer.weights.clone();
    c.bias = layer.bias.clone();
    c.activation = layer.activation;
    copy.layers_.push_back(std::move(c));
  }
  return copy;
}

}  // namespace provq
