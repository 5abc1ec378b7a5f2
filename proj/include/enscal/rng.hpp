#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace enscal {

std::uint64_t splitmix64(std::uint64_t x);

// FNV-1a; std::hash is implementation-defined, station substreams are not.
std::uint64_t fnv1a64(std::string_view text);

// Byte-stable across platforms: mt19937_64 is fully specified by the
// standard and all variate transforms below go through our own quantile
// functions instead of implementation-defined std distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }
  // Uniform on the open interval (0,1).
  double uniform01();
  // Uniform integer in [0, n-1].
  std::uint64_t below(std::uint64_t n);
  double normal(double mu, double sigma);
  double trunc_normal(double mu, double sigma);
  double gamma_mean_sd(double mean, double sd);

 private:
  std::mt19937_64 eng_;
};

// Order-independent per-case substream seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b);

}  // namespace enscal
