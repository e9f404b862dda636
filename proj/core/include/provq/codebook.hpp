#pragma once

#include <cstddef>
#include <filesystem>

#include "provq/rng.hpp"
#include "provq/tensor.hpp"

namespace provq {

// The discrete bottleneck: K learnable code vectors of dimension d_lat.
// Codes live in a single K x d tensor registered with the optimizer.
struct Codebook {
  Tensor codes;  // K x d_lat, requires_grad

  std::size_t size() const { return codes.rows(); }
  std::size_t dim() const { return codes.cols(); }

  // Codes drawn from N(0, stddev^2).
  static Codebook gaussian(std::size_t k, std::size_t d_lat, double stddev,
                           Rng& rng);
  static Codebook from_values(std::size_t k, std::size_t d_lat,
                              std::vector<double> values);

  void validate() const;
};

// One code per row, plain comma-separated doubles.
void save_codebook_csv(const Codebook& codebook,
                       const std::filesystem::path& path);
Codebook load_codebook_csv(const std::filesystem::path& path);

}  // namespace provq
