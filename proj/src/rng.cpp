#include "anderson/rng.hpp"

#include <cmath>
#include <numbers>

namespace anderson {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  return splitmix64(splitmix64(splitmix64(seed_) ^ stream_) ^ counter);
}

std::uint64_t CounterRng::bits(const Site& site) const {
  std::uint64_t h = splitmix64(splitmix64(seed_) ^ stream_);
  for (int i = 0; i < kDim; ++i) h = splitmix64(h ^ static_cast<std::uint64_t>(site[i]));
  return h;
}

namespace {
double to_open_unit(std::uint64_t b) {
  return (static_cast<double>(b >> 11) + 0.5) * 0x1.0p-53;
}
}  // namespace

double CounterRng::uniform(std::uint64_t counter) const { return to_open_unit(bits(counter)); }

double CounterRng::uniform(const Site& site) const { return to_open_unit(bits(site)); }

double CounterRng::normal(std::uint64_t counter) const {
  // Box-Muller on two independent keys
  const double u1 = to_open_unit(bits(2 * counter));
  const double u2 = to_open_unit(bits(2 * counter + 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

CounterRng CounterRng::substream(std::uint64_t index) const {
  return CounterRng(splitmix64(seed_ ^ splitmix64(stream_ + 0x632be59bd9b4e019ULL)), index);
}

std::uint64_t SequentialRng::below(std::uint64_t n) {
  if (n == 0) return 0;
  return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
}

}  // namespace anderson
