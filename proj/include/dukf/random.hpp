#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace dukf {

/// Mixes a base seed and a stream index into an independent 64-bit seed
/// (SplitMix64 finalizer applied twice).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/**
 * @brief Explicitly seeded random stream.
 *
 * Every operation that consumes randomness takes one of these by reference;
 * there is no global generator. Sub-streams are obtained with
 * `RandomStream(seed, stream_index)`, which keeps parallel work reproducible
 * independent of the worker count.
 */
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0);

  double normal() { return normal_(engine_); }
  /// Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }
  /// Exponential waiting time with the given rate (> 0).
  double exponential(double rate) { return exponential_(engine_) / rate; }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::exponential_distribution<double> exponential_{1.0};
};

/// 64-bit FNV-1a over raw bytes, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace dukf
