#include "treetail/rng.hpp"

#include <stdexcept>

namespace treetail {

namespace {

constexpr uint32_t kMul0 = 0xD2511F53u;
constexpr uint32_t kMul1 = 0xCD9E8D57u;
constexpr uint32_t kWeyl0 = 0x9E3779B9u;
constexpr uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(std::array<uint32_t, 4>& c, const std::array<uint32_t, 2>& k) {
  const uint64_t p0 = static_cast<uint64_t>(kMul0) * c[0];
  const uint64_t p1 = static_cast<uint64_t>(kMul1) * c[2];
  const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32), lo0 = static_cast<uint32_t>(p0);
  const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32), lo1 = static_cast<uint32_t>(p1);
  c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

std::array<uint32_t, 4> Philox4x32::block(std::array<uint32_t, 4> counter,
                                          std::array<uint32_t, 2> key) {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    round_once(counter, key);
  }
  return counter;
}

Philox4x32::Philox4x32(uint64_t seed, uint32_t domain, uint64_t stream)
    : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)},
      prefix_{static_cast<uint32_t>(stream), static_cast<uint32_t>(stream >> 32), domain} {}

void Philox4x32::refill() {
  if (block_index_ > 0xFFFFFFFFull) {
    throw std::runtime_error("Philox4x32: stream exhausted");
  }
  buffer_ = block({static_cast<uint32_t>(block_index_), prefix_[0], prefix_[1], prefix_[2]}, key_);
  ++block_index_;
  pos_ = 0;
}

uint32_t Philox4x32::next_u32() {
  if (pos_ == 4) refill();
  return buffer_[pos_++];
}

uint64_t Philox4x32::next_u64() {
  const uint64_t lo = next_u32();
  const uint64_t hi = next_u32();
  return lo | (hi << 32);
}

double Philox4x32::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

uint64_t Philox4x32::next_below(uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("next_below: bound must be positive");
  if ((bound & (bound - 1)) == 0) return next_u64() & (bound - 1);
  const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t r = next_u64();
  while (r >= limit) r = next_u64();
  return r % bound;
}

}  // namespace treetail
