#include "opiqsdc/bits.hpp"

namespace opiqsdc {

BitVec bytes_to_bits(const std::vector<std::uint8_t>& bytes) {
  BitVec out(bytes.size() * 8);
  for (std::size_t i = 0; i < bytes.size(); ++i)
    for (int b = 0; b < 8; ++b) out[8 * i + b] = (bytes[i] >> b) & 1u;
  return out;
}

std::vector<std::uint8_t> bits_to_bytes(const BitVec& bits) {
  std::vector<std::uint8_t> out((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) out[i / 8] |= static_cast<std::uint8_t>((bits[i] & 1u) << (i % 8));
  return out;
}

}  // namespace opiqsdc
