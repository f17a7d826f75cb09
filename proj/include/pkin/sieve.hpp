#ifndef PKIN_SIEVE_HPP
#define PKIN_SIEVE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pkin/errors.hpp"

namespace pkin {

// Primes <= limit by the plain sieve; used for sieving primes of later segments.
inline std::vector<std::uint32_t> base_primes(std::uint32_t limit) {
  std::vector<std::uint32_t> out;
  if (limit < 2) return out;
  std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return out;
}

inline std::uint64_t isqrt_u64(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Segmented sieve of Eratosthenes over [lo, hi]. Odd numbers only; one byte
// per odd candidate per segment.
class SegmentedSieve {
 public:
  static constexpr std::size_t kDefaultSegmentBytes = 1 << 18;

  explicit SegmentedSieve(std::size_t segment_bytes = kDefaultSegmentBytes) : segment_bytes_(segment_bytes) {
    if (segment_bytes_ == 0) throw resource_error("sieve segment size must be positive");
  }

  template <typename Visit>
  void for_each_prime(std::uint64_t lo, std::uint64_t hi, Visit&& visit) const {
    if (hi < lo || hi < 2) return;
    if (hi > (std::uint64_t{1} << 62)) throw resource_error("sieve bound above 2^62");
    if (lo <= 2) {
      visit(std::uint64_t{2});
      lo = 3;
    }
    if (hi < 3 || lo > hi) return;
    const auto root = static_cast<std::uint32_t>(isqrt_u64(hi));
    const auto primes = base_primes(root);

    std::uint64_t first_odd = lo | 1;
    std::vector<char> composite;
    for (std::uint64_t seg_lo = first_odd; seg_lo <= hi; seg_lo += 2 * segment_bytes_) {
      std::uint64_t seg_hi = std::min<std::uint64_t>(hi, seg_lo + 2 * (segment_bytes_ - 1));
      std::size_t count = (seg_hi - seg_lo) / 2 + 1;
      composite.assign(count, 0);
      for (std::size_t i = 1; i < primes.size(); ++i) {
        std::uint64_t p = primes[i];
        std::uint64_t start = std::max(p * p, (seg_lo + p - 1) / p * p);
        if (start % 2 == 0) start += p;
        if (start > seg_hi) continue;
        for (std::uint64_t m = start; m <= seg_hi; m += 2 * p) composite[(m - seg_lo) / 2] = 1;
      }
      for (std::size_t k = 0; k < count; ++k) {
        std::uint64_t v = seg_lo + 2 * k;
        if (!composite[k] && v > 1) visit(v);
      }
      if (seg_hi == hi) break;
    }
  }

  std::vector<std::uint64_t> primes(std::uint64_t lo, std::uint64_t hi) const {
    std::vector<std::uint64_t> out;
    for_each_prime(lo, hi, [&](std::uint64_t p) { out.push_back(p); });
    return out;
  }

 private:
  std::size_t segment_bytes_;
};

inline std::vector<std::uint64_t> primes_between(std::uint64_t lo, std::uint64_t hi) {
  return SegmentedSieve{}.primes(lo, hi);
}

}  // namespace pkin

#endif  // PKIN_SIEVE_HPP
