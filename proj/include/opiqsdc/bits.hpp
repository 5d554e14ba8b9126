#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "opiqsdc/rng.hpp"

namespace opiqsdc {

// One bit per element, values 0/1.
using BitVec = std::vector<std::uint8_t>;

// Bob's view of a transmitted block: 0, 1 or kErased.
using ChannelWord = std::vector<std::int8_t>;
inline constexpr std::int8_t kErased = -1;

inline BitVec xor_bits(const BitVec& a, const BitVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("xor of unequal lengths");
  BitVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
  return out;
}

inline BitVec random_bits(Rng& rng, std::size_t n) {
  BitVec out(n);
  for (std::size_t i = 0; i < n; i += 64) {
    std::uint64_t w = rng();
    for (std::size_t j = i; j < n && j < i + 64; ++j, w >>= 1) out[j] = static_cast<std::uint8_t>(w & 1u);
  }
  return out;
}

inline std::size_t hamming_distance(const BitVec& a, const BitVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("distance of unequal lengths");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] ^ b[i]) & 1u;
  return d;
}

inline ChannelWord clean_word(const BitVec& bits) { return ChannelWord(bits.begin(), bits.end()); }

BitVec bytes_to_bits(const std::vector<std::uint8_t>& bytes);  // LSB first
std::vector<std::uint8_t> bits_to_bytes(const BitVec& bits);     // pads the last byte with zeros

}  // namespace opiqsdc
