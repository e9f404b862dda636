#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace provq {

using Shape = std::vector<std::size_t>;

// Dense 64-bit tensor with a gradient slot of identical shape. A Tensor is a
// shared handle: copies alias the same storage, which lets the tape, the
// optimizer and the caller all observe one set of values and grads. Use
// clone() for an independent copy.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> values,
                     bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);
  static Tensor matrix(std::size_t rows, std::size_t cols,
                       std::vector<double> values, bool requires_grad = false);
  static Tensor vector(std::vector<double> values, bool requires_grad = false);

  bool defined() const { return static_cast<bool>(d_); }
  const Shape& shape() const { return d_->shape; }
  std::size_t rank() const { return d_->shape.size(); }
  std::size_t numel() const { return d_->values.size(); }
  std::size_t rows() const;  // rank-2 only
  std::size_t cols() const;  // rank-2 only

  // Like shared_ptr, a const handle still exposes mutable storage; the
  // backward rules captured by the tape rely on this to accumulate grads.
  std::vector<double>& values() const { return d_->values; }
  std::vector<double>& grad() const { return d_->grad; }

  // Scalar value; throws DimensionError when numel() != 1.
  double item() const;

  bool requires_grad() const { return d_->requires_grad; }
  void set_requires_grad(bool enabled) { d_->requires_grad = enabled; }

  void zero_grad() const;
  bool all_finite() const;

  Tensor clone() const;

  bool same_storage(const Tensor& other) const { return d_ == other.d_; }

 private:
  struct Data {
    Shape shape;
    std::vector<double> values;
    std::vector<double> grad;
    bool requires_grad = false;
  };

  std::shared_ptr<Data> d_;
};

std::string shape_string(const Shape& shape);

}  // namespace provq
