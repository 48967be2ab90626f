#include "rng.hpp"

#include <cmath>
#include <numbers>

namespace anvar {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

} // namespace

Philox::Philox(std::uint64_t seed, std::uint64_t stream) noexcept {
  key_[0] = static_cast<std::uint32_t>(seed);
  key_[1] = static_cast<std::uint32_t>(seed >> 32);
  // Counter words 2/3 carry the stream id; words 0/1 count blocks.
  counter_[0] = 0;
  counter_[1] = 0;
  counter_[2] = static_cast<std::uint32_t>(stream);
  counter_[3] = static_cast<std::uint32_t>(stream >> 32);
}

Philox Philox::from_raw(const std::array<std::uint32_t, 4>& counter,
                        const std::array<std::uint32_t, 2>& key) noexcept {
  Philox p(0, 0);
  p.counter_ = counter;
  p.key_ = key;
  return p;
}

void Philox::generate() noexcept {
  std::array<std::uint32_t, 4> c = counter_;
  std::array<std::uint32_t, 2> k = key_;
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c[0], hi0, lo0);
    mulhilo(kPhiloxM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  block_ = c;
  avail_ = 4;
  if (++counter_[0] == 0) ++counter_[1];
}

std::uint32_t Philox::next_u32() noexcept {
  if (avail_ == 0) generate();
  return block_[4 - avail_--];
}

std::uint64_t Philox::next_u64() noexcept {
  const std::uint64_t hi = next_u32();
  return (hi << 32) | next_u32();
}

double Philox::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Philox::uniform(double lo, double hi) noexcept {
  return lo + (hi - lo) * uniform();
}

double Philox::gaussian() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // u1 on (0, 1] so the log is finite.
  const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

void Philox::fill_gaussian(double* dst, Index n) noexcept {
  for (Index i = 0; i < n; ++i) dst[i] = gaussian();
}

void Philox::fill_uniform(double* dst, Index n, double lo, double hi) noexcept {
  for (Index i = 0; i < n; ++i) dst[i] = uniform(lo, hi);
}

} // namespace anvar
