#pragma once

#include <numeric>
#include <stdexcept>
#include <vector>

namespace cq {

// Multiset of cycle sizes as multiplicities: counts[i] is the number of
// cycles of size i+1. Trailing zeros are kept trimmed so equal states
// compare equal.
struct CycleCounts {
  std::vector<long long> counts;

  CycleCounts() = default;
  explicit CycleCounts(std::vector<long long> c) : counts(std::move(c)) {
    for (long long v : counts)
      if (v < 0) throw std::domain_error("CycleCounts: negative multiplicity");
    trim();
  }

  // degree n = sum i * c_i
  long long degree() const {
    long long n = 0;
    for (std::size_t i = 0; i < counts.size(); ++i)
      n += static_cast<long long>(i + 1) * counts[i];
    return n;
  }

  // number of cycles K = sum c_i
  long long cycles() const {
    return std::accumulate(counts.begin(), counts.end(), 0LL);
  }

  long long count_of_size(long long size) const {
    if (size < 1) throw std::domain_error("count_of_size: size must be >= 1");
    std::size_t idx = static_cast<std::size_t>(size - 1);
    return idx < counts.size() ? counts[idx] : 0;
  }

  void trim() {
    while (!counts.empty() && counts.back() == 0) counts.pop_back();
  }

  bool operator==(const CycleCounts& other) const = default;
};

}  // namespace cq
