#include "degtest/rng.hpp"

#include <bit>
#include <cmath>

namespace degtest {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer; full-avalanche 64-bit mix.
std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : key_(mix64(mix64(seed + kGolden) ^ mix64(stream_id + 0x6a09e667f3bcc909ULL))) {}

std::uint64_t RngStream::next_u64() { return mix64(key_ + (counter_++) * kGolden); }

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

long long RngStream::fair_binomial(long long n) {
  long long count = 0;
  long long remaining = n;
  while (remaining >= 64) {
    count += std::popcount(next_u64());
    remaining -= 64;
  }
  if (remaining > 0) {
    const std::uint64_t mask = (remaining == 64) ? ~0ULL : ((1ULL << remaining) - 1);
    count += std::popcount(next_u64() & mask);
  }
  return count;
}

long long RngStream::binomial(long long n, double p) {
  if (p <= 0.0) return 0;
  if (p >= 1.0) return n;
  if (p == 0.5) return fair_binomial(n);
  // Bernoulli sum; one raw draw per trial keeps the stream layout simple and
  // the result exact.
  const std::uint64_t threshold =
      static_cast<std::uint64_t>(std::ldexp(p, 64) < 0x1.0p64 ? std::ldexp(p, 64) : 0x1.fffffffffffffp63);
  long long count = 0;
  for (long long i = 0; i < n; ++i) {
    if (next_u64() < threshold) ++count;
  }
  return count;
}

long long RngStream::uniform_int(long long lo, long long hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  // Rejection-free modulo bias is negligible for our spans (< 2^14) but use
  // Lemire's multiply-shift to keep draws unbiased anyway.
  const unsigned __int128 prod =
      static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(span);
  return lo + static_cast<long long>(prod >> 64);
}

std::uint64_t stable_hash(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_stream(std::uint64_t base, std::uint64_t index) {
  return mix64(base + kGolden * (index + 1));
}

}  // namespace degtest
