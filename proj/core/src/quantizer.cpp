#include "provq/quantizer.hpp"

#include "provq/errors.hpp"
#include "provq/kmeans.hpp"

namespace provq {

std::vector<int> nearest_code(const Tensor& z, const Codebook& codebook) {
  if (codebook.size() == 0) {
    throw ConfigError("nearest_code: empty codebook");
  }
  if (z.rank() != 2 || z.cols() != codebook.dim()) {
    throw DimensionError("nearest_code: z has shape " +
                         shape_string(z.shape()) + " but codes are " +
                         shape_string(codebook.codes.shape()));
  }

  const std::size_t n = z.rows();
  const std::size_t d = z.cols();
  std::vector<int> indices(n);
  const double* codes = codebook.codes.values().data();
  const double* rows = z.values().data();
  for (std::size_t i = 0; i < n; ++i) {
    indices[i] = static_cast<int>(
        nearest_row(rows + i * d, codes, codebook.size(), d));
  }
  return indices;
}

Quantized quantize_ste(Tape& tape, const Tensor& z, const Codebook& codebook) {
  if (!z.all_finite()) {
    throw NumericError("quantize_ste: non-finite latent values");
  }
  Quantized q;
  q.indices = nearest_code(z, codebook);
  const Tensor selected = tape.gather_rows(codebook.codes, q.indices);
  // sg[e_k] + (z - sg[z]): the residual is exactly zero in the forward pass,
  // so values equal e_k bit-for-bit while gradients pass straight to z.
  q.z_q = tape.add(tape.stop_gradient(selected),
                   tape.sub(z, tape.stop_gradient(z)));
  return q;
}

Tensor blend(Tape& tape, const Tensor& z, const Tensor& z_q, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("blend: alpha must lie in [0, 1], got " +
                      std::to_string(alpha));
  }
  return tape.add(tape.scale(z, alpha), tape.scale(z_q, 1.0 - alpha));
}

Tensor vq_loss(Tape& tape, const Tensor& z, const Codebook& codebook,
               const std::vector<int>& indices) {
  const Tensor selected = tape.gather_rows(codebook.codes, indices);
  return tape.mse(selected, tape.stop_gradient(z));
}

Tensor commit_loss(Tape& tape, const Tensor& z, const Codebook& codebook,
                   const std::vector<int>& indices) {
  const Tensor selected = tape.gather_rows(codebook.codes, indices);
  return tape.mse(z, tape.stop_gradient(selected));
}

Codebook kmeans_init(const Tensor& embeddings, std::size_t k, Rng& rng,
                     int max_iters) {
  if (embeddings.rank() != 2) {
    throw DimensionError("kmeans_init: embeddings must be rank 2, got " +
                         shape_string(embeddings.shape()));
  }
  const std::size_t n = embeddings.rows();
  const std::size_t d = embeddings.cols();
  if (n < k) {
    throw ConfigError("kmeans_init: " + std::to_string(n) +
                      " embeddings cannot seed " + std::to_string(k) +
                      " codes");
  }
  KMeansResult km = kmeans(embeddings.values(), n, d, k, rng, max_iters);
  return Codebook::from_values(k, d, std::move(km.centroids));
}

}  // namespace provq
