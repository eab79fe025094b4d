#pragma once

#include <array>
#include <cstdint>

namespace sbm {

/// Deterministic random stream identified by (seed, stream_id).
///
/// The generator is xoshiro256** whose state is filled by splitmix64 from a
/// mix of the seed and the stream id. Every derived variate (uniform,
/// geometric, Poisson, bounded integer) is computed here from the raw 64-bit
/// output, so a given (seed, stream_id) produces the same sequence on every
/// platform and standard library.
class RngStream {
 public:
  static constexpr const char* kAlgorithm = "xoshiro256**/splitmix64";

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Child stream for trial `index`. Depends only on (seed, stream_id, index).
  RngStream split(std::uint64_t index) const;

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  /// Uniform on [0, bound); bound must be positive.
  std::uint64_t uniform_int(std::uint64_t bound);
  bool bernoulli(double p);
  /// Number of failures before the first success of a Bernoulli(p) sequence.
  std::uint64_t geometric_skip(double p);
  std::uint64_t poisson(double mean);
  /// +1 or -1 with probability 1/2 each.
  int sign();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace sbm
