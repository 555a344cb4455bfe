#pragma once

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "ennreg/data.hpp"
#include "ennreg/model.hpp"

namespace ennreg::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("ennreg_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

inline std::vector<Prototype> random_prototypes(std::mt19937_64& rng, std::size_t J, std::size_t p,
                                                bool zero_slope = false) {
  std::normal_distribution<double> n01(0.0, 1.0);
  std::vector<Prototype> out(J);
  for (auto& pr : out) {
    pr.center.resize(p);
    pr.slope.assign(p, 0.0);
    for (auto& c : pr.center) c = n01(rng);
    if (!zero_slope)
      for (auto& b : pr.slope) b = n01(rng);
    pr.scale = log_uniform(rng, 0.2, 2.0) * (n01(rng) < 0 ? -1.0 : 1.0);
    pr.intercept = 2.0 * n01(rng);
    pr.variance = log_uniform(rng, 0.05, 5.0);
    pr.precision = log_uniform(rng, 0.05, 20.0);
  }
  return out;
}

inline std::vector<double> random_point(std::mt19937_64& rng, std::size_t p) {
  std::normal_distribution<double> n01(0.0, 1.0);
  std::vector<double> x(p);
  for (auto& v : x) v = n01(rng);
  return x;
}

inline Model wrap_model(std::vector<Prototype> protos) {
  Model m;
  const std::size_t p = protos.front().dim();
  m.prototypes = std::move(protos);
  m.scaling = FeatureScaling::identity(p);
  for (std::size_t k = 0; k < p; ++k) m.feature_names.push_back("x" + std::to_string(k + 1));
  return m;
}

inline Dataset linear_data(std::size_t n, std::uint64_t seed, double slope, double intercept) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Dataset d;
  d.features = Matrix(n, 1);
  d.response.resize(n);
  d.feature_names = {"x"};
  for (std::size_t i = 0; i < n; ++i) {
    d.features(i, 0) = u(rng);
    d.response[i] = slope * d.features(i, 0) + intercept;
  }
  return d;
}

}  // namespace ennreg::testing
