#pragma once

#include <cstdint>
#include <string_view>

namespace degtest {

// Counter-based deterministic generator. A stream is fully determined by
// (seed, stream_id); the state is just a counter, so streams can be created
// cheaply per task/round and advanced independently. Two streams with
// distinct ids are statistically independent for our purposes.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();

  // Uniform draw in [0, 1).
  double uniform();

  // Binomial(n, 1/2) via popcount over raw bits; exact and fast.
  long long fair_binomial(long long n);

  // Binomial(n, p) as a sum of n Bernoulli draws.
  long long binomial(long long n, double p);

  // Uniform integer in [lo, hi] inclusive.
  long long uniform_int(long long lo, long long hi);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Stable 64-bit FNV-1a hash; used to key per-task streams so results do not
// depend on task ordering.
std::uint64_t stable_hash(std::string_view s);

// Derives a child stream id from a base id and an index (e.g. per round).
std::uint64_t derive_stream(std::uint64_t base, std::uint64_t index);

}  // namespace degtest
