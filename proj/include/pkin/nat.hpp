#ifndef PKIN_NAT_HPP
#define PKIN_NAT_HPP

#include <gmpxx.h>

#include <bit>
#include <concepts>
#include <cstdint>
#include <optional>
#include <string>

#include "pkin/errors.hpp"

namespace pkin {

// Arbitrary-precision non-negative integer. Values such as 211 + 2^448 are
// routine, so everything outside the sieve domain is carried as a Nat.
using Nat = mpz_class;

inline Nat to_nat(std::uint64_t v) {
  Nat r;
  mpz_import(r.get_mpz_t(), 1, -1, sizeof(v), 0, 0, &v);
  return r;
}

inline Nat nat_from_string(const std::string& s) {
  Nat r;
  if (s.empty() || s[0] == '-' || r.set_str(s, 10) != 0) {
    throw domain_error("not a non-negative decimal integer: '" + s + "'");
  }
  return r;
}

inline std::string to_string(const Nat& n) { return n.get_str(10); }

inline bool fits_u64(const Nat& n) {
  return sgn(n) >= 0 && mpz_sizeinbase(n.get_mpz_t(), 2) <= 64;
}

inline std::uint64_t to_u64(const Nat& n) {
  if (!fits_u64(n)) throw domain_error("value does not fit in 64 bits: " + to_string(n));
  std::uint64_t v = 0;
  mpz_export(&v, nullptr, -1, sizeof(v), 0, 0, n.get_mpz_t());
  return v;
}

inline Nat pow2(unsigned long exponent) {
  Nat r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, exponent);
  return r;
}

// Returns n when d == 2^n. Distances between distinct primes are >= 1, so a
// zero distance is rejected rather than answered.
template <std::unsigned_integral T>
constexpr std::optional<unsigned> power_of_two_exponent(T d) {
  if (d == 0) throw domain_error("power-of-two test on zero distance");
  if (!std::has_single_bit(d)) return std::nullopt;
  return static_cast<unsigned>(std::countr_zero(d));
}

inline std::optional<unsigned> power_of_two_exponent(const Nat& d) {
  if (sgn(d) < 0) throw domain_error("power-of-two test on negative distance");
  if (sgn(d) == 0) throw domain_error("power-of-two test on zero distance");
  mpz_srcptr z = d.get_mpz_t();
  auto low = mpz_scan1(z, 0);
  if (mpz_scan1(z, low + 1) != ~static_cast<mp_bitcnt_t>(0)) return std::nullopt;
  return static_cast<unsigned>(low);
}

template <typename T>
bool is_power_of_two(const T& d) {
  return power_of_two_exponent(d).has_value();
}

}  // namespace pkin

#endif  // PKIN_NAT_HPP
