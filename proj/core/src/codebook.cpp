#include "provq/codebook.hpp"

#include <fstream>
#include <sstream>

#include "provq/csv.hpp"
#include "provq/errors.hpp"

namespace provq {

Codebook Codebook::gaussian(std::size_t k, std::size_t d_lat, double stddev,
                            Rng& rng) {
  std::vector<double> values(k * d_lat);
  for (double& v : values) v = stddev * rng.normal();
  return from_values(k, d_lat, std::move(values));
}

Codebook Codebook::from_values(std::size_t k, std::size_t d_lat,
                               std::vector<double> values) {
  Codebook cb;
  cb.codes = Tensor::matrix(k, d_lat, std::move(values), true);
  cb.validate();
  return cb;
}

void Codebook::validate() const {
  if (!codes.defined() || size() < 2) {
    throw ConfigError("codebook: needs at least 2 codes");
  }
  if (!codes.all_finite()) {
    throw NumericError("codebook: non-finite code values");
  }
}

void save_codebook_csv(const Codebook& codebook,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("codebook: cannot write '" + path.string() + "'");
  const auto& v = codebook.codes.values();
  const std::size_t d = codebook.dim();
  for (std::size_t i = 0; i < codebook.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (j > 0) out << ',';
      out << format_double(v[i * d + j]);
    }
    out << '\n';
  }
  if (!out) throw IoError("codebook: write failed for '" + path.string() + "'");
}

Codebook load_codebook_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("codebook: cannot read '" + path.string() + "'");

  std::vector<double> values;
  std::size_t dim = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::size_t cols = 0;
    while (std::getline(row, cell, ',')) {
      values.push_back(parse_double(cell, path.string(), lineno));
      ++cols;
    }
    if (rows == 0) {
      dim = cols;
    } else if (cols != dim) {
      throw IoError("codebook: '" + path.string() + "' line " +
                    std::to_string(lineno) + " has " + std::to_string(cols) +
                    " columns, expected " + std::to_string(dim));
    }
    ++rows;
  }
  if (rows < 2) {
    throw IoError("codebook: '" + path.string() + "' has fewer than 2 codes");
  }
  return Codebook::from_values(rows, dim, std::move(values));
}

}  // namespace provq
