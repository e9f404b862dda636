#pragma once

#include <vector>

#include "provq/codebook.hpp"
#include "provq/rng.hpp"
#include "provq/tape.hpp"
#include "provq/tensor.hpp"

namespace provq {

// Per-row index of the Euclidean-nearest code; ties break to the lowest
// index.
std::vector<int> nearest_code(const Tensor& z, const Codebook& codebook);

struct Quantized {
  Tensor z_q;               // values equal the selected codes exactly
  std::vector<int> indices;
};

// Straight-through quantization: z_q = sg[e_k] + z - sg[z]. Forward values
// equal the selected codes; the gradient of z_q w.r.t. z is the identity and
// no gradient reaches the codes through z_q.
Quantized quantize_ste(Tape& tape, const Tensor& z, const Codebook& codebook);

// Convex blend alpha * z + (1 - alpha) * z_q. With z_q in STE form the
// gradient w.r.t. z is the identity for every alpha.
Tensor blend(Tape& tape, const Tensor& z, const Tensor& z_q, double alpha);

// Mean squared distance between sg[z] and the selected raw codes. The
// gradient flows into the codebook only; this is what actually trains it.
Tensor vq_loss(Tape& tape, const Tensor& z, const Codebook& codebook,
               const std::vector<int>& indices);

// Same forward value with the stop-gradient on the code side; the gradient
// flows into z (and hence the encoder) only.
Tensor commit_loss(Tape& tape, const Tensor& z, const Codebook& codebook,
                   const std::vector<int>& indices);

// Codebook from Lloyd's algorithm (k-means++ seeding) over a batch of
// encoder embeddings.
Codebook kmeans_init(const Tensor& embeddings, std::size_t k, Rng& rng,
                     int max_iters = 100);

}  // namespace provq
