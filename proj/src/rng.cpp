#include "enscal/rng.hpp"

#include <cmath>

#include "enscal/distributions.hpp"
#include "enscal/errors.hpp"

namespace enscal {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double Rng::uniform01() {
  // 53-bit mantissa, then shift off 0 so inverse-CDF transforms stay finite.
  double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  return (u + 0.5 * 0x1.0p-53);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) fail_numeric("below(0)");
  // Rejection step removes modulo bias; almost always one draw.
  std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
  std::uint64_t v = eng_();
  while (v > limit) v = eng_();
  return v % n;
}

double Rng::normal(double mu, double sigma) {
  return quantile(Normal{mu, sigma}, uniform01());
}

double Rng::trunc_normal(double mu, double sigma) {
  return quantile(TruncNormal{mu, sigma}, uniform01());
}

double Rng::gamma_mean_sd(double mean, double sd) {
  return quantile(GammaMeanSd{mean, sd}, uniform01());
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(base ^ 0x5851f42d4c957f2dULL) ^ splitmix64(a) ^
                    splitmix64(b ^ 0xda3e39cb94b95bdbULL));
}

}  // namespace enscal
