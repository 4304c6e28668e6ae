#pragma once

#include <cstdint>

#include "anderson/lattice.hpp"

namespace anderson {

std::uint64_t splitmix64(std::uint64_t x);

// Stateless counter-based generator: every draw is a pure function of its keys,
// so results do not depend on evaluation order or thread count.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  std::uint64_t bits(std::uint64_t counter) const;
  std::uint64_t bits(const Site& site) const;
  // uniform in the open interval (0, 1)
  double uniform(std::uint64_t counter) const;
  double uniform(const Site& site) const;
  double normal(std::uint64_t counter) const;

  CounterRng substream(std::uint64_t index) const;
  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

// Sequential wrapper over CounterRng for code that just wants a stream of draws.
class SequentialRng {
 public:
  explicit SequentialRng(std::uint64_t seed, std::uint64_t stream = 0) : rng_(seed, stream) {}
  double uniform() { return rng_.uniform(counter_++); }
  double normal() { return rng_.normal(counter_++); }
  std::uint64_t bits() { return rng_.bits(counter_++); }
  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n);
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

 private:
  CounterRng rng_;
  std::uint64_t counter_ = 0;
};

}  // namespace anderson
