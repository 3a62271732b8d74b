#include "wbst/rng.hpp"

#include <cmath>
#include <numeric>

namespace wbst {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t replicate,
                       std::uint64_t stream) {
  const std::uint64_t a = mix64(seed + 0x9e3779b97f4a7c15ULL);
  const std::uint64_t b = mix64(a ^ (replicate + 0x632be59bd9b4e019ULL));
  key_lo_ = mix64(b ^ (stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
  key_hi_ = mix64(b ^ (stream * 0xa0761d6478bd642fULL + 0xe7037ed1a0b428dbULL));
}

CounterRng::result_type CounterRng::output(std::uint64_t i) const {
  const std::uint64_t z = mix64(i * 0x9e3779b97f4a7c15ULL + key_lo_);
  return mix64(z ^ key_hi_);
}

std::uint64_t CounterRng::below(std::uint64_t bound) {
  unsigned __int128 m = static_cast<unsigned __int128>(operator()()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(operator()()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

// Marsaglia polar method; the spare deviate is kept for the next call.
double CounterRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

std::vector<double> uniform_sample(std::size_t count, CounterRng& rng) {
  std::vector<double> out(count);
  for (auto& x : out) x = rng.uniform();
  return out;
}

std::vector<std::int64_t> random_permutation(std::size_t n, CounterRng& rng) {
  std::vector<std::int64_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::int64_t{1});
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

}  // namespace wbst
