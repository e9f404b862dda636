#include "provq/tensor.hpp"

#include <cmath>

#include "provq/errors.hpp"

namespace provq {

namespace {

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t dim : shape) n *= dim;
  return n;
}

}  // namespace

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  Tensor t;
  t.d_ = std::make_shared<Data>();
  t.d_->shape = std::move(shape);
  const std::size_t n = shape_numel(t.d_->shape);
  t.d_->values.assign(n, 0.0);
  t.d_->grad.assign(n, 0.0);
  t.d_->requires_grad = requires_grad;
  return t;
}

Tensor Tensor::from(Shape shape, std::vector<double> values,
                    bool requires_grad) {
  if (shape_numel(shape) != values.size()) {
    throw DimensionError("tensor: " + std::to_string(values.size()) +
                         " values do not fill shape " + shape_string(shape));
  }
  Tensor t = zeros(std::move(shape), requires_grad);
  t.d_->values = std::move(values);
  return t;
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return from({1}, {value}, requires_grad);
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols,
                      std::vector<double> values, bool requires_grad) {
  return from({rows, cols}, std::move(values), requires_grad);
}

Tensor Tensor::vector(std::vector<double> values, bool requires_grad) {
  const std::size_t n = values.size();
  return from({n}, std::move(values), requires_grad);
}

std::size_t Tensor::rows() const {
  if (rank() != 2) {
    throw DimensionError("tensor: rows() on rank-" + std::to_string(rank()) +
                         " tensor " + shape_string(shape()));
  }
  return d_->shape[0];
}

std::size_t Tensor::cols() const {
  if (rank() != 2) {
    throw DimensionError("tensor: cols() on rank-" + std::to_string(rank()) +
                         " tensor " + shape_string(shape()));
  }
  return d_->shape[1];
}

double Tensor::item() const {
  if (numel() != 1) {
    throw DimensionError("tensor: item() on non-scalar of shape " +
                         shape_string(shape()));
  }
  return d_->values[0];
}

void Tensor::zero_grad() const {
  for (double& g : d_->grad) g = 0.0;
}

bool Tensor::all_finite() const {
  for (double v : d_->values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Tensor Tensor::clone() const {
  Tensor t;
  t.d_ = std::make_shared<Data>(*d_);
  return t;
}

std::string shape_string(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out += "x";
    out += std::to_string(shape[i]);
  }
  out += "]";
  return out;
}

}  // namespace provq
