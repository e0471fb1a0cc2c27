#include "cyclequeue/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace cq {

double Rng::exponential(double rate) {
  if (!(rate > 0.0)) throw std::domain_error("exponential: rate must be > 0");
  return -std::log(uniform01_pos()) / rate;
}

long long Rng::poisson(double mean) {
  if (mean < 0.0) throw std::domain_error("poisson: mean must be >= 0");
  if (mean == 0.0) return 0;
  // Knuth product method in chunks of 30 so the running product never
  // underflows; Poisson(a + b) = Poisson(a) + Poisson(b) independently.
  long long total = 0;
  double remaining = mean;
  while (remaining > 0.0) {
    double chunk = remaining > 30.0 ? 30.0 : remaining;
    remaining -= chunk;
    double limit = std::exp(-chunk);
    double prod = uniform01_pos();
    long long count = 0;
    while (prod > limit) {
      prod *= uniform01_pos();
      ++count;
    }
    total += count;
  }
  return total;
}

std::size_t Rng::uniform_index(std::size_t n) {
  if (n == 0) throw std::domain_error("uniform_index: n must be > 0");
  // Rejection to kill modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return static_cast<std::size_t>(x % n);
}

}  // namespace cq
