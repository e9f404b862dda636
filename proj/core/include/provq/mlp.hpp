#pragma once

#include <cstddef>
#include <vector>

#include "provq/rng.hpp"
#include "provq/tape.hpp"
#include "provq/tensor.hpp"

namespace provq {

enum class Activation { kTanh, kIdentity };

struct DenseLayer {
  Tensor weights;  // in x out
  Tensor bias;     // out
  Activation activation = Activation::kIdentity;
};

// Fully connected stack used for both the encoder and the decoder: tanh on
// hidden layers, identity on the output layer. Weights start uniform in
// +-1/sqrt(fan_in), biases at zero.
class Mlp {
 public:
  Mlp() = default;
  // widths lists every layer width including input, e.g. {2, 64, 64, 2}.
  Mlp(const std::vector<std::size_t>& widths, Rng& rng);

  Tensor forward(Tape& tape, const Tensor& input) const;

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<std::size_t> widths() const;

  Mlp clone() const;

 private:
  std::vector<DenseLayer> layers_;
};

}  // namespace provq
