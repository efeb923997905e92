#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace oqsim {

namespace detail {

// splitmix64 finalizer: a well-mixed bijection on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Counter-based stream generator: draw i of stream s is a pure function of
// (seed, s, i). Estimators hand every sample its own stream id, so results
// do not depend on evaluation order and reruns are bit-for-bit identical.
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t stream)
      : key_(detail::mix64(seed ^ (0x9e3779b97f4a7c15ULL * detail::mix64(stream + 1)))) {}

  std::uint64_t next_u64() {
    counter_ += 0x9e3779b97f4a7c15ULL;
    return detail::mix64(key_ ^ counter_);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; always consumes two draws (no caching,
  // so the stream position stays a pure function of the call count).
  double normal() {
    const double u = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
  }

  // Circularly symmetric complex normal with E|z|^2 = 1
  // (real and imaginary parts independent N(0, 1/2)).
  std::complex<double> complex_normal() {
    const double u = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double v = uniform();
    const double r = std::sqrt(-std::log(u));
    return {r * std::cos(2.0 * std::numbers::pi * v), r * std::sin(2.0 * std::numbers::pi * v)};
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Hands out independent streams derived from one master seed.
struct RngFactory {
  std::uint64_t seed = 0;
  StreamRng stream(std::uint64_t id) const { return StreamRng(seed, id); }
};

}  // namespace oqsim
