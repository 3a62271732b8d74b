#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace wbst {

// Counter-based generator: the i-th output is a pure function of
// (seed, replicate, stream, i). Replicates can therefore be evaluated in any
// order, on any number of threads, with identical results.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t replicate = 0,
                      std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() { return output(counter_++); }

  // Uniform on the open interval (0, 1); never returns 0 or 1.
  double uniform() {
    return (static_cast<double>(operator()() >> 11) + 0.5) * 0x1.0p-53;
  }

  // The uniform() value of output i, without touching the counter.
  double uniform_at(std::uint64_t i) const {
    return (static_cast<double>(output(i) >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound), bound > 0 (Lemire's rejection method).
  std::uint64_t below(std::uint64_t bound);

  double normal();

  std::uint64_t counter() const { return counter_; }
  void discard(std::uint64_t steps) { counter_ += steps; }

 private:
  result_type output(std::uint64_t i) const;

  std::uint64_t key_lo_;
  std::uint64_t key_hi_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t mix64(std::uint64_t z);

// Named streams keep independent uses of one replicate from colliding.
namespace streams {
inline constexpr std::uint64_t tree = 1;
inline constexpr std::uint64_t reflected = 2;
inline constexpr std::uint64_t silhouette = 3;
inline constexpr std::uint64_t dickman = 4;
inline constexpr std::uint64_t arcsine = 5;
inline constexpr std::uint64_t path = 6;
inline constexpr std::uint64_t resample = 7;
inline constexpr std::uint64_t normal = 8;
inline constexpr std::uint64_t redraw = 1000;
}  // namespace streams

std::vector<double> uniform_sample(std::size_t count, CounterRng& rng);

// Uniformly random permutation of 1..n (Fisher-Yates).
std::vector<std::int64_t> random_permutation(std::size_t n, CounterRng& rng);

}  // namespace wbst
