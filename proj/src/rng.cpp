#include "sigfilter/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "sigfilter/normal.hpp"

namespace sigfilter {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index) {
  std::uint64_t h = splitmix64(master ^ fnv1a64(label));
  return splitmix64(h ^ index);
}

double RngStream::normal() { return std_normal_quantile(uniform01()); }

double RngStream::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::domain_error("RngStream::gamma: shape and rate must be positive");

  double boost = 1.0;
  double a = shape;
  if (a < 1.0) {
    boost = std::pow(uniform01(), 1.0 / a);
    a += 1.0;
  }
  const double d = a - 1.0 / 3.0;
  const double c = 1.0 / (3.0 * std::sqrt(d));
  for (;;) {
    const double z = normal();
    double v = 1.0 + c * z;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = uniform01();
    if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) {
      return boost * d * v / rate;
    }
  }
}

}  // namespace sigfilter
