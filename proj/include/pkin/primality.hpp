#ifndef PKIN_PRIMALITY_HPP
#define PKIN_PRIMALITY_HPP

#include <array>
#include <cstdint>
#include <string>

#include "pkin/nat.hpp"

namespace pkin {

struct PrimalityVerdict {
  enum class Kind { Composite, ProvenPrime, ProbablePrime };

  Kind kind = Kind::Composite;
  // Random-base strong-pseudoprime rounds run on top of the base-2 + Lucas
  // core. Zero unless kind == ProbablePrime.
  unsigned rounds = 0;

  bool prime() const { return kind != Kind::Composite; }
  explicit operator bool() const { return prime(); }

  // Upper bound on the false-positive probability as a power of two
  // (error < 2^bound); 0 for proven results.
  int error_bound_log2() const { return kind == Kind::ProbablePrime ? -2 * static_cast<int>(rounds) : 0; }

  static PrimalityVerdict composite() { return {}; }
  static PrimalityVerdict proven() { return {Kind::ProvenPrime, 0}; }
  static PrimalityVerdict probable(unsigned rounds) { return {Kind::ProbablePrime, rounds}; }

  friend bool operator==(const PrimalityVerdict&, const PrimalityVerdict&) = default;
};

inline std::string to_string(const PrimalityVerdict& v) {
  switch (v.kind) {
    case PrimalityVerdict::Kind::Composite: return "composite";
    case PrimalityVerdict::Kind::ProvenPrime: return "proven_prime";
    case PrimalityVerdict::Kind::ProbablePrime: return "probable_prime(rounds=" + std::to_string(v.rounds) + ")";
  }
  return "?";
}

struct PrimalityOptions {
  unsigned rounds = 64;
};

// Below this bound the first 13 primes as strong-pseudoprime bases decide
// primality exactly (no composite below 3317044064679887385961981 passes all
// of them).
inline const Nat& deterministic_threshold() {
  static const Nat t("3300000000000000000000000");
  return t;
}

namespace detail {

inline constexpr std::array<unsigned, 13> kDeterministicBases = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};

inline constexpr std::array<unsigned, 24> kSmallPrimes = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                                                           41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

// Strong probable-prime test to base a; n odd, n > 3.
inline bool strong_probable_prime(std::uint64_t n, std::uint64_t a) {
  a %= n;
  if (a == 0) return true;
  std::uint64_t d = n - 1;
  unsigned s = std::countr_zero(d);
  d >>= s;
  std::uint64_t x = pow_mod(a, d, n);
  if (x == 1 || x == n - 1) return true;
  for (unsigned r = 1; r < s; ++r) {
    x = mul_mod(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

inline bool strong_probable_prime(const Nat& n, const Nat& a) {
  Nat nm1 = n - 1;
  mp_bitcnt_t s = mpz_scan1(nm1.get_mpz_t(), 0);
  Nat d;
  mpz_fdiv_q_2exp(d.get_mpz_t(), nm1.get_mpz_t(), s);
  Nat x;
  mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
  if (x == 1 || x == nm1) return true;
  for (mp_bitcnt_t r = 1; r < s; ++r) {
    mpz_powm_ui(x.get_mpz_t(), x.get_mpz_t(), 2, n.get_mpz_t());
    if (x == nm1) return true;
    if (x == 1) return false;
  }
  return false;
}

inline void halve_mod(Nat& x, const Nat& n) {
  if (mpz_odd_p(x.get_mpz_t())) x += n;
  mpz_fdiv_q_2exp(x.get_mpz_t(), x.get_mpz_t(), 1);
}

// Strong Lucas probable-prime test with Selfridge parameters (method A):
// first D in 5, -7, 9, -11, ... with (D|n) = -1, P = 1, Q = (1 - D) / 4.
// n odd, n > 3, not a perfect square.
inline bool strong_lucas_probable_prime(const Nat& n) {
  long d_param = 5;
  for (;;) {
    Nat dz(d_param);
    int j = mpz_jacobi(dz.get_mpz_t(), n.get_mpz_t());
    if (j == -1) break;
    if (j == 0 && abs(dz) != n) return false;
    d_param = d_param > 0 ? -(d_param + 2) : -d_param + 2;
  }
  const long p_param = 1;
  const long q_param = (1 - d_param) / 4;

  Nat np1 = n + 1;
  mp_bitcnt_t s = mpz_scan1(np1.get_mpz_t(), 0);
  Nat d;
  mpz_fdiv_q_2exp(d.get_mpz_t(), np1.get_mpz_t(), s);

  Nat dmod = Nat(d_param) % n;
  if (dmod < 0) dmod += n;
  Nat qmod = Nat(q_param) % n;
  if (qmod < 0) qmod += n;

  Nat u = 1, v = p_param, qk = qmod;
  auto bits = mpz_sizeinbase(d.get_mpz_t(), 2);
  for (long i = static_cast<long>(bits) - 2; i >= 0; --i) {
    u = (u * v) % n;
    v = (v * v - 2 * qk) % n;
    if (v < 0) v += n;
    qk = (qk * qk) % n;
    if (mpz_tstbit(d.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) {
      Nat u2 = p_param * u + v;
      Nat v2 = dmod * u + p_param * v;
      halve_mod(u2, n);
      halve_mod(v2, n);
      u = u2 % n;
      v = v2 % n;
      qk = (qk * qmod) % n;
    }
  }
  if (u == 0 || v == 0) return true;
  for (mp_bitcnt_t r = 1; r < s; ++r) {
    v = (v * v - 2 * qk) % n;
    if (v < 0) v += n;
    if (v == 0) return true;
    qk = (qk * qk) % n;
  }
  return false;
}

}  // namespace detail

// Deterministic for every 64-bit input.
inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (unsigned p : detail::kSmallPrimes) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  if (n < 89ull * 89ull) return true;
  for (unsigned a : detail::kDeterministicBases) {
    if (!detail::strong_probable_prime(n, a)) return false;
  }
  return true;
}

inline PrimalityVerdict is_prime(const Nat& n, const PrimalityOptions& opts = {}) {
  if (n < 2) return PrimalityVerdict::composite();
  if (fits_u64(n)) {
    return is_prime_u64(to_u64(n)) ? PrimalityVerdict::proven() : PrimalityVerdict::composite();
  }
  for (unsigned p : detail::kSmallPrimes) {
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return PrimalityVerdict::composite();
  }
  if (n < deterministic_threshold()) {
    for (unsigned a : detail::kDeterministicBases) {
      if (!detail::strong_probable_prime(n, Nat(a))) return PrimalityVerdict::composite();
    }
    return PrimalityVerdict::proven();
  }

  if (!detail::strong_probable_prime(n, Nat(2))) return PrimalityVerdict::composite();
  if (mpz_perfect_square_p(n.get_mpz_t())) return PrimalityVerdict::composite();
  if (!detail::strong_lucas_probable_prime(n)) return PrimalityVerdict::composite();

  // Bases are drawn from a generator seeded by n itself so that a verdict is
  // a pure function of (n, rounds).
  gmp_randclass rng(gmp_randinit_mt);
  rng.seed(n);
  Nat span = n - 3;
  for (unsigned r = 0; r < opts.rounds; ++r) {
    Nat a = rng.get_z_range(span) + 2;
    if (!detail::strong_probable_prime(n, a)) return PrimalityVerdict::composite();
  }
  return PrimalityVerdict::probable(opts.rounds);
}

inline PrimalityVerdict is_prime(std::uint64_t n) {
  return is_prime_u64(n) ? PrimalityVerdict::proven() : PrimalityVerdict::composite();
}

}  // namespace pkin

#endif  // PKIN_PRIMALITY_HPP
