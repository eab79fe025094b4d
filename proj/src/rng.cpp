#include "sbm/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sbm {
namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

std::uint64_t mix_ids(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a ^ 0x6a09e667f3bcc909ULL;
  std::uint64_t h = splitmix64(x);
  x = h ^ b;
  return splitmix64(x);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::uint64_t x = mix_ids(seed, stream_id);
  for (auto& word : s_) word = splitmix64(x);
  // xoshiro must not start from the all-zero state
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

RngStream RngStream::split(std::uint64_t index) const {
  return RngStream(seed_, mix_ids(stream_id_ + 0x3c6ef372fe94f82bULL, index));
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RngStream::uniform_open() {
  return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
}

std::uint64_t RngStream::uniform_int(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_int: bound must be positive");
  // Lemire's nearly divisionless method.
  unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next_u64()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

bool RngStream::bernoulli(double p) { return uniform() < p; }

std::uint64_t RngStream::geometric_skip(double p) {
  if (p >= 1.0) return 0;
  if (p <= 0.0) return std::numeric_limits<std::uint64_t>::max();
  const double skip = std::floor(std::log(uniform_open()) / std::log1p(-p));
  if (skip >= 1.8e19) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(skip);
}

std::uint64_t RngStream::poisson(double mean) {
  if (mean < 0.0 || !std::isfinite(mean)) throw std::invalid_argument("poisson: bad mean");
  // Inversion by sequential search; large means are split into independent
  // chunks, since a sum of independent Poissons is Poisson.
  constexpr double kChunk = 30.0;
  std::uint64_t total = 0;
  while (mean > 0.0) {
    const double lambda = mean > kChunk ? kChunk : mean;
    mean -= lambda;
    const double u = uniform();
    double pmf = std::exp(-lambda);
    double cdf = pmf;
    std::uint64_t k = 0;
    while (u >= cdf && pmf > 0.0) {
      ++k;
      pmf *= lambda / static_cast<double>(k);
      cdf += pmf;
    }
    total += k;
  }
  return total;
}

int RngStream::sign() { return (next_u64() >> 63) ? 1 : -1; }

}  // namespace sbm
