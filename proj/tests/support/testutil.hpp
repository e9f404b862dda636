#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "provq/tensor.hpp"

namespace testutil {

// Central finite differences of a scalar forward() with respect to one
// tensor's values. The forward closure must re-run the whole computation
// from the (mutated) tensor values.
inline std::vector<double> finite_diff(const provq::Tensor& param,
                                       const std::function<double()>& forward,
                                       double h = 1e-5) {
  std::vector<double> grads(param.numel());
  auto& values = param.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double orig = values[i];
    values[i] = orig + h;
    const double up = forward();
    values[i] = orig - h;
    const double down = forward();
    values[i] = orig;
    grads[i] = (up - down) / (2.0 * h);
  }
  return grads;
}

// Relative error with a small floor so near-zero gradients compare
// absolutely against 1e-3 * tol instead of blowing up on FD noise.
inline double rel_err(double analytic, double numeric) {
  const double scale =
      std::max({std::abs(analytic), std::abs(numeric), 1e-3});
  return std::abs(analytic - numeric) / scale;
}

inline double max_rel_err(const std::vector<double>& analytic,
                          const std::vector<double>& numeric) {
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    worst = std::max(worst, rel_err(analytic[i], numeric[i]));
  }
  return worst;
}

// Fresh unique directory under the system temp dir; removed by the caller
// or left for inspection on failure.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::string tmpl =
        (std::filesystem::temp_directory_path() / (tag + ".XXXXXX")).string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (!mkdtemp(buf.data())) {
      throw std::runtime_error("mkdtemp failed for " + tmpl);
    }
    path_ = buf.data();
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct CmdResult {
  int exit_code = -1;
  std::string output;
};

// Runs a shell command, capturing stdout+stderr.
inline CmdResult run_cmd(const std::string& cmd) {
  CmdResult result;
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed: " + cmd);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    result.output.append(buf.data(), n);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

inline std::string read_file(const std::filesystem::path& path) {
  FILE* f = fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), f)) > 0) out.append(buf.data(), n);
  fclose(f);
  return out;
}

inline void write_file(const std::filesystem::path& path,
                       const std::string& text) {
  FILE* f = fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot write " + path.string());
  fwrite(text.data(), 1, text.size(), f);
  fclose(f);
}

inline std::size_t count_occurrences(const std::string& text,
                                     const std::string& needle) {
  std::size_t count = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

}  // namespace testutil
