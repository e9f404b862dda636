#include "provq/tape.hpp"

#include <cmath>

#include "provq/errors.hpp"

namespace provq {

namespace {

void check_same_shape(const char* op, const Tensor& a, const Tensor& b,
                      const char* a_name, const char* b_name) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": " + a_name + " has shape " +
                         shape_string(a.shape()) + " but " + b_name +
                         " has shape " + shape_string(b.shape()));
  }
}

}  // namespace

Tensor Tape::make_output(Shape shape, bool requires_grad) {
  return Tensor::zeros(std::move(shape), requires_grad);
}

Tensor Tape::matmul_add(const Tensor& input, const Tensor& weights,
                        const Tensor& bias) {
  if (input.rank() != 2) {
    throw DimensionError("matmul_add: input must be rank 2, got " +
                         shape_string(input.shape()));
  }
  if (weights.rank() != 2) {
    throw DimensionError("matmul_add: weights must be rank 2, got " +
                         shape_string(weights.shape()));
  }
  if (input.cols() != weights.rows()) {
    throw DimensionError("matmul_add: weights has " +
                         std::to_string(weights.rows()) +
                         " rows but input has " + std::to_string(input.cols()) +
                         " columns");
  }
  if (bias.rank() != 1 || bias.numel() != weights.cols()) {
    throw DimensionError("matmul_add: bias has shape " +
                         shape_string(bias.shape()) + ", expected [" +
                         std::to_string(weights.cols()) + "]");
  }

  const std::size_t n = input.rows();
  const std::size_t d_in = input.cols();
  const std::size_t d_out = weights.cols();
  const bool rg =
      input.requires_grad() || weights.requires_grad() || bias.requires_grad();

  Tensor out = make_output({n, d_out}, rg);
  {
    const auto& x = input.values();
    const auto& w = weights.values();
    const auto& b = bias.values();
    auto& y = out.values();
    for (std::size_t i = 0; i < n; ++i) {
      double* yi = y.data() + i * d_out;
      for (std::size_t j = 0; j < d_out; ++j) yi[j] = b[j];
      for (std::size_t k = 0; k < d_in; ++k) {
        const double xik = x[i * d_in + k];
        const double* wk = w.data() + k * d_out;
        for (std::size_t j = 0; j < d_out; ++j) yi[j] += xik * wk[j];
      }
    }
  }

  if (rg) {
    record([input, weights, bias, out, n, d_in, d_out]() {
      const auto& gy = out.grad();
      if (input.requires_grad()) {
        auto& gx = input.grad();
        const auto& w = weights.values();
        for (std::size_t i = 0; i < n; ++i) {
          const double* gyi = gy.data() + i * d_out;
          for (std::size_t k = 0; k < d_in; ++k) {
            const double* wk = w.data() + k * d_out;
            double acc = 0.0;
            for (std::size_t j = 0; j < d_out; ++j) acc += gyi[j] * wk[j];
            gx[i * d_in + k] += acc;
          }
        }
      }
      if (weights.requires_grad()) {
        auto& gw = weights.grad();
        const auto& x = input.values();
        for (std::size_t i = 0; i < n; ++i) {
          const double* gyi = gy.data() + i * d_out;
          for (std::size_t k = 0; k < d_in; ++k) {
            const double xik = x[i * d_in + k];
            double* gwk = gw.data() + k * d_out;
            for (std::size_t j = 0; j < d_out; ++j) gwk[j] += xik * gyi[j];
          }
        }
      }
      if (bias.requires_grad()) {
        auto& gb = bias.grad();
        for (std::size_t i = 0; i < n; ++i) {
          const double* gyi = gy.data() + i * d_out;
          for (std::size_t j = 0; j < d_out; ++j) gb[j] += gyi[j];
        }
      }
    });
  }
  return out;
}

Tensor Tape::tanh(const Tensor& input) {
  const bool rg = input.requires_grad();
  Tensor out = make_output(input.shape(), rg);
  const auto& x = input.values();
  auto& y = out.values();
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::tanh(x[i]);

  if (rg) {
    record([input, out]() {
      const auto& y = out.values();
      const auto& gy = out.grad();
      auto& gx = input.grad();
      for (std::size_t i = 0; i < y.size(); ++i) {
        gx[i] += gy[i] * (1.0 - y[i] * y[i]);
      }
    });
  }
  return out;
}

Tensor Tape::add(const Tensor& a, const Tensor& b) {
  check_same_shape("add", a, b, "left operand", "right operand");
  const bool rg = a.requires_grad() || b.requires_grad();
  Tensor out = make_output(a.shape(), rg);
  const auto& av = a.values();
  const auto& bv = b.values();
  auto& y = out.values();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = av[i] + bv[i];

  if (rg) {
    record([a, b, out]() {
      const auto& gy = out.grad();
      if (a.requires_grad()) {
        auto& ga = a.grad();
        for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i];
      }
      if (b.requires_grad()) {
        auto& gb = b.grad();
        for (std::size_t i = 0; i < gy.size(); ++i) gb[i] += gy[i];
      }
    });
  }
  return out;
}

Tensor Tape::sub(const Tensor& a, const Tensor& b) {
  check_same_shape("sub", a, b, "left operand", "right operand");
  const bool rg = a.requires_grad() || b.requires_grad();
  Tensor out = make_output(a.shape(), rg);
  const auto& av = a.values();
  const auto& bv = b.values();
  auto& y = out.values();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = av[i] - bv[i];

  if (rg) {
    record([a, b, out]() {
      const auto& gy = out.grad();
      if (a.requires_grad()) {
        auto& ga = a.grad();
        for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i];
      }
      if (b.requires_grad()) {
        auto& gb = b.grad();
        for (std::size_t i = 0; i < gy.size(); ++i) gb[i] -= gy[i];
      }
    });
  }
  return out;
}

Tensor Tape::scale(const Tensor& input, double factor) {
  const bool rg = input.requires_grad();
  Tensor out = make_output(input.shape(), rg);
  const auto& x = input.values();
  auto& y = out.values();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = factor * x[i];

  if (rg) {
    record([input, out, factor]() {
      const auto& gy = out.grad();
      auto& gx = input.grad();
      for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += factor * gy[i];
    });
  }
  return out;
}

Tensor Tape::sum(const Tensor& input) {
  const bool rg = input.requires_grad();
  Tensor out = make_output({1}, rg);
  double acc = 0.0;
  for (double v : input.values()) acc += v;
  out.values()[0] = acc;

  if (rg) {
    record([input, out]() {
      const double g = out.grad()[0];
      auto& gx = input.grad();
      for (double& v : gx) v += g;
    });
  }
  return out;
}

Tensor Tape::mse(const Tensor& pred, const Tensor& target) {
  check_same_shape("mse", pred, target, "pred", "target");
  const bool rg = pred.requires_grad() || target.requires_grad();
  Tensor out = make_output({1}, rg);
  const auto& p = pred.values();
  const auto& t = target.values();
  const double inv_n = 1.0 / static_cast<double>(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - t[i];
    acc += d * d;
  }
  out.values()[0] = acc * inv_n;

  if (rg) {
    record([pred, target, out, inv_n]() {
      const double g = out.grad()[0];
      const auto& p = pred.values();
      const auto& t = target.values();
      if (pred.requires_grad()) {
        auto& gp = pred.grad();
        for (std::size_t i = 0; i < p.size(); ++i) {
          gp[i] += g * 2.0 * (p[i] - t[i]) * inv_n;
        }
      }
      if (target.requires_grad()) {
        auto& gt = target.grad();
        for (std::size_t i = 0; i < p.size(); ++i) {
          gt[i] -= g * 2.0 * (p[i] - t[i]) * inv_n;
        }
      }
    });
  }
  return out;
}

Tensor Tape::stop_gradient(const Tensor& input) {
  // Forward value is the input bit-for-bit; no rule is recorded, so the
  // backward pass contributes exactly zero through this edge.
  Tensor out = make_output(input.shape(), false);
  out.values() = input.values();
  return out;
}

Tensor Tape::gather_rows(const Tensor& table, const std::vector<int>& indices) {
  if (table.rank() != 2) {
    throw DimensionError("gather_rows: table must be rank 2, got " +
                         shape_string(table.shape()));
  }
  const std::size_t k = table.rows();
  const std::size_t d = table.cols();
  for (int idx : indices) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= k) {
      throw Error("gather_rows: index " + std::to_string(idx) +
                  " out of range for table with " + std::to_string(k) +
                  " rows");
    }
  }

  const bool rg = table.requires_grad();
  Tensor out = make_output({indices.size(), d}, rg);
  const auto& src = table.values();
  auto& y = out.values();
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const double* row = src.data() + static_cast<std::size_t>(indices[i]) * d;
    double* dst = y.data() + i * d;
    for (std::size_t j = 0; j < d; ++j) dst[j] = row[j];
  }

  if (rg) {
    record([table, out, indices, d]() {
      const auto& gy = out.grad();
      auto& gt = table.grad();
      for (std::size_t i = 0; i < indices.size(); ++i) {
        double* row = gt.data() + static_cast<std::size_t>(indices[i]) * d;
        const double* g = gy.data() + i * d;
        for (std::size_t j = 0; j < d; ++j) row[j] += g[j];
      }
    });
  }
  return out;
}

void Tape::backward(const Tensor& loss) {
  if (loss.numel() != 1) {
    throw DimensionError("backward: loss must be scalar, got shape " +
                         shape_string(loss.shape()));
  }
  loss.grad()[0] += 1.0;
  for (auto it = rules_.rbegin(); it != rules_.rend(); ++it) (*it)();
}

}  // namespace provq
