#ifndef PKIN_WIEFERICH_HPP
#define PKIN_WIEFERICH_HPP

#include <algorithm>
#include <cstdint>
#include <future>
#include <optional>
#include <vector>

#include "pkin/classifier.hpp"
#include "pkin/core_arith.hpp"
#include "pkin/search.hpp"
#include "pkin/sieve.hpp"

namespace pkin {

// 2^(p-1) == 1 (mod p^2).
inline bool is_wieferich(const Nat& p) {
  if (!is_prime(p)) throw domain_error("is_wieferich: " + to_string(p) + " is not prime");
  return mod_pow(Nat(2), Nat(p - 1), Nat(p * p)) == 1;
}

struct WieferichRecord {
  Nat p;
  bool satisfies = false;
  BMembership kinship;
  std::optional<SearchReport> cousin_scan;  // only for hits in O
};

struct WieferichOptions {
  unsigned cousin_budget = 64;
  unsigned threads = 1;
  ScanOptions scan;
};

namespace detail {

// p < 2^32 keeps p^2 inside 64 bits.
inline bool wieferich_u32(std::uint64_t p) {
  return mod_pow(std::uint64_t{2}, p - 1, p * p) == 1;
}

}  // namespace detail

// Tests every prime <= hi; each hit is classified and, when it lies in O,
// scanned for a cousin with the configured budget. Records ascend.
inline std::vector<WieferichRecord> wieferich_scan(std::uint64_t hi, const WieferichOptions& opts = {}) {
  if (hi < 3) throw domain_error("wieferich_scan: bound must be >= 3");
  if (hi >= (std::uint64_t{1} << 32)) throw resource_error("wieferich_scan: bound must stay below 2^32");

  const unsigned workers = std::max(1u, opts.threads);
  const std::uint64_t stride = hi / workers + 1;
  std::vector<std::future<std::vector<std::uint64_t>>> jobs;
  for (unsigned w = 0; w < workers; ++w) {
    std::uint64_t a = 2 + w * stride;
    if (a > hi) break;
    std::uint64_t b = std::min(hi, a + stride - 1);
    jobs.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred, [a, b] {
      std::vector<std::uint64_t> hits;
      SegmentedSieve{}.for_each_prime(a, b, [&](std::uint64_t p) {
        if (detail::wieferich_u32(p)) hits.push_back(p);
      });
      return hits;
    }));
  }
  std::vector<std::uint64_t> hits;
  for (auto& j : jobs) {
    auto part = j.get();
    hits.insert(hits.end(), part.begin(), part.end());
  }

  std::vector<WieferichRecord> records;
  for (auto p : hits) {
    WieferichRecord rec;
    rec.p = to_nat(p);
    rec.satisfies = true;
    rec.kinship = b_membership(rec.p, opts.scan.primality);
    if (!rec.kinship.in_b) {
      auto seg = classify_range(2, p);
      rec.cousin_scan = candidate_scan(rec.p, opts.cousin_budget, seg, opts.scan);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace pkin

#endif  // PKIN_WIEFERICH_HPP
