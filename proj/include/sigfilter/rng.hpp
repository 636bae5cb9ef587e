#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sigfilter {

// Deterministic stream seed derived from a master seed, a textual label, and
// an index. Labels keep independent uses of the same master seed from
// colliding; the mixing is fixed so results are reproducible across builds.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index);

// A self-contained random stream. The engine (mt19937_64) has a fully
// specified output sequence, and all variate mappings below are implemented
// here rather than delegated to std distributions, whose algorithms are
// implementation-defined. This keeps every simulation bit-reproducible.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : eng_(seed) {}

  static RngStream derive(std::uint64_t master, std::string_view label, std::uint64_t index) {
    return RngStream(derive_seed(master, label, index));
  }

  std::uint64_t next_u64() { return eng_(); }

  // Uniform draw strictly inside (0,1); 53-bit resolution.
  double uniform01() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via the inverse-CDF transform.
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Gamma(shape, rate) via Marsaglia-Tsang squeeze (with the power boost for
  // shape < 1).
  double gamma(double shape, double rate);

 private:
  std::mt19937_64 eng_;
};

}  // namespace sigfilter
