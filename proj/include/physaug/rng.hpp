#pragma once

#include <cstdint>
#include <string_view>

namespace physaug {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// FNV-1a over the bytes of `s`; stable across platforms.
constexpr std::uint64_t hash_name(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Counter-based random stream.
///
/// Every draw is a pure function of (key, counter), so a stream can be
/// re-derived anywhere from the same key path: `KeyedStream(seed).child(a).child(b)`
/// yields identical numbers regardless of thread or evaluation order. Normal
/// deviates use Box-Muller on two consecutive counters.
class KeyedStream {
 public:
  explicit KeyedStream(std::uint64_t key) : key_(mix64(key)) {}

  KeyedStream child(std::uint64_t tag) const { return KeyedStream(key_ ^ mix64(tag + 0x632BE59BD9B4E019ULL)); }
  KeyedStream child(std::string_view tag) const { return child(hash_name(tag)); }

  std::uint64_t key() const { return key_; }

  std::uint64_t next_u64() { return mix64(key_ + 0xD1B54A32D192ED03ULL * ++counter_); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal deviate.
  double normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace physaug
