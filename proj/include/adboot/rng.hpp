#pragma once

#include <array>
#include <cstdint>

namespace adboot {

// Philox4x32-10 block cipher used as a counter-based generator.
class Philox {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox(std::uint64_t seed) : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  Counter operator()(Counter ctr) const;

  // Four 32-bit words for the 128-bit counter (a, b).
  Counter block(std::uint64_t a, std::uint64_t b) const {
    return (*this)({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32), static_cast<std::uint32_t>(b),
                    static_cast<std::uint32_t>(b >> 32)});
  }

 private:
  Key key_;
};

// Independent named streams under one master seed.
enum class Stream : std::uint64_t { Sample = 1, Bootstrap = 2, CrossFitBootstrap = 3, Derived = 4 };

// Child seed for (master, stream, index).
std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index);

// Sequential reader over the blocks (counter_hi, 0), (counter_hi, 1), ...
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t counter_hi) : gen_(seed), hi_(counter_hi) {}

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  // Uniform on (0, 1) with 53 random bits, never 0.
  double next_open01();
  // Uniform on {0, ..., bound-1} by 64x64 -> 128 multiply-shift.
  std::uint64_t next_below(std::uint64_t bound);
  double next_normal();

 private:
  Philox gen_;
  std::uint64_t hi_;
  std::uint64_t lo_ = 0;
  Philox::Counter buf_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Stateless: uniform index for (seed, rep, slot).
std::uint64_t uniform_index(std::uint64_t seed, std::uint64_t rep, std::uint64_t slot, std::uint64_t bound);

}  // namespace adboot
