#ifndef PKIN_CORE_ARITH_HPP
#define PKIN_CORE_ARITH_HPP

#include <cstdint>
#include <vector>

#include "pkin/nat.hpp"
#include "pkin/primality.hpp"

namespace pkin {

inline Nat mod_pow(const Nat& base, const Nat& exp, const Nat& modulus) {
  if (modulus < 2) throw domain_error("mod_pow: modulus must be >= 2");
  if (sgn(exp) < 0) throw domain_error("mod_pow: negative exponent");
  Nat r;
  mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), modulus.get_mpz_t());
  return r;
}

inline std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t modulus) {
  if (modulus < 2) throw domain_error("mod_pow: modulus must be >= 2");
  return detail::pow_mod(base, exp, modulus);
}

namespace detail {

// Odd primes used to strike candidates before running a full test.
inline const std::vector<unsigned>& wheel_primes() {
  static const std::vector<unsigned> primes = [] {
    constexpr unsigned kLimit = 4096;
    std::vector<bool> composite(kLimit + 1, false);
    std::vector<unsigned> out;
    for (unsigned i = 3; i <= kLimit; i += 2) {
      if (composite[i]) continue;
      out.push_back(i);
      for (unsigned j = i * i; j <= kLimit; j += 2 * i) composite[j] = true;
    }
    return out;
  }();
  return primes;
}

// Scans odd candidates start, start + step, ... (step = +-2) in windows,
// striking multiples of the wheel primes first. start must be odd and far
// above the largest wheel prime.
inline Nat scan_odd(const Nat& start, int step, const PrimalityOptions& opts) {
  constexpr std::size_t kWindow = 2048;
  const auto& wheel = wheel_primes();
  Nat base = start;
  std::vector<char> struck(kWindow);
  for (;;) {
    std::fill(struck.begin(), struck.end(), 0);
    for (unsigned p : wheel) {
      // Index k of the candidate base + step*k that p divides.
      unsigned long r = mpz_fdiv_ui(base.get_mpz_t(), p);
      unsigned long k0;
      if (r == 0) {
        k0 = 0;
      } else if (step > 0) {
        // base + 2k = 0 (mod p)  ->  k = (p - r) * inv2 mod p
        k0 = ((p - r) * static_cast<unsigned long>((p + 1) / 2)) % p;
      } else {
        k0 = (r * static_cast<unsigned long>((p + 1) / 2)) % p;
      }
      for (std::size_t k = k0; k < kWindow; k += p) struck[k] = 1;
    }
    for (std::size_t k = 0; k < kWindow; ++k) {
      if (struck[k]) continue;
      Nat cand = base + step * static_cast<long>(k);
      if (is_prime(cand, opts)) return cand;
    }
    base += step * static_cast<long>(kWindow);
  }
}

inline const Nat& wheel_cutover() {
  static const Nat c = to_nat(1ull << 62);
  return c;
}

}  // namespace detail

inline std::uint64_t next_prime(std::uint64_t n) {
  if (n < 2) return 2;
  if (n >= 18446744073709551557ull) throw domain_error("next_prime: no 64-bit prime above input");
  std::uint64_t c = (n + 1) | 1;
  while (!is_prime_u64(c)) c += 2;
  return c;
}

inline std::uint64_t prev_prime(std::uint64_t n) {
  if (n <= 2) throw domain_error("prev_prime: no prime below " + std::to_string(n));
  if (n == 3) return 2;
  std::uint64_t c = (n - 1) | 1;
  if (c >= n) c -= 2;
  while (!is_prime_u64(c)) c -= 2;
  return c;
}

inline Nat next_prime(const Nat& n, const PrimalityOptions& opts = {}) {
  if (sgn(n) < 0) throw domain_error("next_prime: negative input");
  if (n < detail::wheel_cutover()) return to_nat(next_prime(to_u64(n)));
  Nat start = n + 1;
  if (mpz_even_p(start.get_mpz_t())) start += 1;
  return detail::scan_odd(start, +2, opts);
}

inline Nat prev_prime(const Nat& n, const PrimalityOptions& opts = {}) {
  if (n <= 2) throw domain_error("prev_prime: no prime below " + to_string(n));
  if (n < detail::wheel_cutover()) return to_nat(prev_prime(to_u64(n)));
  Nat start = n - 1;
  if (mpz_even_p(start.get_mpz_t())) start -= 1;
  return detail::scan_odd(start, -2, opts);
}

}  // namespace pkin

#endif  // PKIN_CORE_ARITH_HPP
