#include "adboot/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace adboot {

namespace {
constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}
}  // namespace

Philox::Counter Philox::operator()(Counter ctr) const {
  Key key = key_;
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, ctr[0], hi0, lo0);
    mulhilo(kM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index) {
  const Philox gen(splitmix(master));
  const auto out = gen.block(static_cast<std::uint64_t>(stream), index);
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

std::uint32_t CounterStream::next_u32() {
  if (used_ == 4) {
    buf_ = gen_.block(hi_, lo_++);
    used_ = 0;
  }
  return buf_[static_cast<std::size_t>(used_++)];
}

std::uint64_t CounterStream::next_u64() {
  const std::uint64_t lo = next_u32();
  const std::uint64_t hi = next_u32();
  return (hi << 32) | lo;
}

double CounterStream::next_open01() {
  const std::uint64_t bits = next_u64() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

std::uint64_t CounterStream::next_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("bound must be positive");
  const unsigned __int128 p = static_cast<unsigned __int128>(next_u64()) * bound;
  return static_cast<std::uint64_t>(p >> 64);
}

double CounterStream::next_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = next_open01();
  const double u2 = next_open01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

std::uint64_t uniform_index(std::uint64_t seed, std::uint64_t rep, std::uint64_t slot, std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("bound must be positive");
  const Philox gen(seed);
  const auto out = gen.block(rep, slot);
  const std::uint64_t r = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  const unsigned __int128 p = static_cast<unsigned __int128>(r) * bound;
  return static_cast<std::uint64_t>(p >> 64);
}

}  // namespace adboot
