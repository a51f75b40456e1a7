#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace loopsoup {

// Philox4x32-10 counter-based block function (Salmon et al. 2011).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// SplitMix64 finalizer, used to derive stream identifiers.
std::uint64_t mix64(std::uint64_t x);

/// Random stream over Philox4x32-10: the key is the seed, the counter holds
/// a 64-bit block index and a 64-bit stream identifier. Streams with
/// different identifiers never share counters, so results depend only on
/// (seed, stream) and not on the order in which streams are consumed.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  // Independent child stream (same seed, derived identifier).
  RandomStream substream(std::uint64_t id) const;

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  // Uniform integer in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n);
  double exponential(double rate);
  double normal();
  // Gamma(shape, scale = 1), Marsaglia-Tsang with the U^{1/shape} boost for
  // shape < 1.
  double gamma(double shape);
  double beta(double a, double b);
  std::uint64_t poisson(double mean);
  // Number of failures before the first success, P(k) = q (1 - q)^k.
  std::uint64_t geometric(double q);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int available_ = 0;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace loopsoup
