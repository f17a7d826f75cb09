#ifndef PKIN_SEARCH_HPP
#define PKIN_SEARCH_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pkin/classifier.hpp"
#include "pkin/core_arith.hpp"
#include "pkin/errors.hpp"
#include "pkin/nat.hpp"

namespace pkin {

struct NeighborGap {
  Nat prime;
  PrimalityVerdict verdict;
  Nat gap;
  std::optional<unsigned> exponent;  // set when gap == 2^exponent
};

// A prime together with both adjacent primes and the gaps to them; 2 has no
// lower neighbour.
struct PrimeNeighborhood {
  Nat value;
  PrimalityVerdict verdict;
  std::optional<NeighborGap> below;
  NeighborGap above;

  bool in_b() const { return (below && below->exponent) || above.exponent.has_value(); }
};

struct WitnessCertificate {
  enum class Claim { InB, InO, CousinPair };

  Claim claim = Claim::InO;
  // One subject for InB/InO; two (lower first) for CousinPair.
  std::vector<PrimeNeighborhood> subjects;
  std::optional<unsigned> pair_exponent;
};

inline std::string to_string(WitnessCertificate::Claim c) {
  switch (c) {
    case WitnessCertificate::Claim::InB: return "in_B";
    case WitnessCertificate::Claim::InO: return "in_O";
    case WitnessCertificate::Claim::CousinPair: return "cousin_pair";
  }
  return "?";
}

namespace detail {

inline std::string check_neighborhood(const PrimeNeighborhood& n, const PrimalityOptions& opts) {
  const std::string v = to_string(n.value);
  if (!is_prime(n.value, opts)) return v + " is not prime";
  auto check_side = [&](const NeighborGap& g, bool lower) -> std::string {
    if (!is_prime(g.prime, opts)) return "neighbour " + to_string(g.prime) + " of " + v + " is not prime";
    Nat gap = lower ? Nat(n.value - g.prime) : Nat(g.prime - n.value);
    if (sgn(gap) <= 0 || gap != g.gap) return "recorded gap next to " + v + " does not match";
    if (power_of_two_exponent(gap) != g.exponent) return "power-of-two flag wrong next to " + v;
    // Adjacency: nothing prime strictly between, checked one integer at a time.
    Nat lo = lower ? g.prime : n.value;
    Nat hi = lower ? n.value : g.prime;
    for (Nat x = lo + 1; x < hi; ++x) {
      if (is_prime(x, opts)) return "prime " + to_string(x) + " lies between " + v + " and its recorded neighbour";
    }
    return {};
  };
  if (n.value == 2) {
    if (n.below) return "2 has no lower neighbour";
  } else {
    if (!n.below) return "missing lower neighbour for " + v;
    if (auto e = check_side(*n.below, true); !e.empty()) return e;
  }
  return check_side(n.above, false);
}

}  // namespace detail

// Replays every primality, gap and adjacency assertion of the certificate
// through fresh primality tests. Returns an empty string on success, else the
// first failed assertion.
inline std::string certificate_failure(const WitnessCertificate& cert, const PrimalityOptions& opts = {}) {
  using Claim = WitnessCertificate::Claim;
  const std::size_t expected = cert.claim == Claim::CousinPair ? 2 : 1;
  if (cert.subjects.size() != expected) return "wrong number of subjects";
  for (const auto& s : cert.subjects) {
    if (auto e = detail::check_neighborhood(s, opts); !e.empty()) return e;
  }
  switch (cert.claim) {
    case Claim::InB:
      if (!cert.subjects[0].in_b()) return "claimed in B but no power-of-two neighbour gap";
      break;
    case Claim::InO:
      if (cert.subjects[0].in_b()) return "claimed in O but a neighbour gap is a power of two";
      break;
    case Claim::CousinPair: {
      const auto& a = cert.subjects[0];
      const auto& b = cert.subjects[1];
      if (a.in_b() || b.in_b()) return "cousin pair member lies in B";
      if (!(a.value < b.value)) return "cousin pair not ordered";
      if (!cert.pair_exponent || power_of_two_exponent(Nat(b.value - a.value)) != cert.pair_exponent) {
        return "cousin pair distance is not the recorded power of two";
      }
      break;
    }
  }
  return {};
}

inline bool verify_certificate(const WitnessCertificate& cert, const PrimalityOptions& opts = {}) {
  return certificate_failure(cert, opts).empty();
}

inline PrimeNeighborhood neighborhood(const Nat& p, const PrimalityOptions& opts = {}) {
  auto verdict = is_prime(p, opts);
  if (!verdict) throw domain_error(to_string(p) + " is not prime");
  auto make = [&](const Nat& q) {
    Nat gap = q > p ? Nat(q - p) : Nat(p - q);
    return NeighborGap{q, is_prime(q, opts), gap, power_of_two_exponent(gap)};
  };
  PrimeNeighborhood n{p, verdict, std::nullopt, make(next_prime(p, opts))};
  if (p > 2) n.below = make(prev_prime(p, opts));
  return n;
}

struct BMembership {
  bool in_b = false;
  // The adjacent prime at power-of-two distance, the lower one when both
  // qualify.
  std::optional<Nat> brother;
  unsigned exponent = 0;
  WitnessCertificate certificate;
};

inline BMembership b_membership(const Nat& p, const PrimalityOptions& opts = {}) {
  auto hood = neighborhood(p, opts);
  BMembership r;
  if (hood.below && hood.below->exponent) {
    r.in_b = true;
    r.brother = hood.below->prime;
    r.exponent = *hood.below->exponent;
  } else if (hood.above.exponent) {
    r.in_b = true;
    r.brother = hood.above.prime;
    r.exponent = *hood.above.exponent;
  }
  r.certificate.claim = r.in_b ? WitnessCertificate::Claim::InB : WitnessCertificate::Claim::InO;
  r.certificate.subjects.push_back(std::move(hood));
  return r;
}

struct SearchStep {
  enum class Status { Composite, PrimeInB, PrimeInO };

  unsigned exponent = 0;
  Nat value;
  Status status = Status::Composite;
  std::optional<Nat> brother;  // PrimeInB only
  PrimalityVerdict verdict;

  friend bool operator==(const SearchStep&, const SearchStep&) = default;
};

struct SearchReport {
  enum class Outcome { CandidateUpTo, CousinFound };

  Nat subject;
  unsigned i_max = 0;
  std::vector<SearchStep> steps;
  Outcome outcome = Outcome::CandidateUpTo;
  std::optional<Nat> witness;
  unsigned witness_exponent = 0;
  bool downward_witness = false;  // found by the q < p clause; no upward steps run
  bool reaches_full_budget = false;  // i_max >= p, i.e. the whole 1..p scan was done
  std::optional<WitnessCertificate> certificate;  // CousinPair when a witness is found
};

struct ScanOptions {
  bool full_scan = false;  // keep scanning past the first O-witness
  unsigned threads = 1;
  PrimalityOptions primality;
};

struct ScanBudget {
  unsigned i_max = 0;
  bool reaches_full_budget = false;
};

// i = 1..p where that is affordable; capped at 512 beyond.
inline ScanBudget default_budget(const Nat& p) {
  if (p <= 512) {
    auto v = static_cast<unsigned>(p.get_ui());
    return {std::max(v, 64u), true};
  }
  return {512, false};
}

namespace detail {

inline SearchStep evaluate_step(const Nat& p, unsigned i, const PrimalityOptions& opts) {
  SearchStep step;
  step.exponent = i;
  step.value = p + pow2(i);
  step.verdict = is_prime(step.value, opts);
  if (!step.verdict) return step;
  auto membership = b_membership(step.value, opts);
  if (membership.in_b) {
    step.status = SearchStep::Status::PrimeInB;
    step.brother = membership.brother;
  } else {
    step.status = SearchStep::Status::PrimeInO;
  }
  return step;
}

}  // namespace detail

// O-members q < p with p - q = 2^n, smallest n first. The segment must
// cover every prime below p.
inline std::optional<std::pair<std::uint64_t, unsigned>> downward_witness(std::uint64_t p,
                                                                          const ClassifiedSegment& seg) {
  if (seg.lo() > 2 || seg.hi() < p) throw domain_error("downward check needs a classification covering [2, p]");
  for (unsigned n = 0; n < 64 && (std::uint64_t{1} << n) < p; ++n) {
    std::uint64_t q = p - (std::uint64_t{1} << n);
    if (seg.in_others(q)) return std::make_pair(q, n);
  }
  return std::nullopt;
}

// Isolated-candidate test. First the downward clause against O-members below
// p, then p + 2^i for i = 1..i_max. Composite values and values in B do not
// disqualify; the first value in O ends the scan as a cousin witness.
inline SearchReport candidate_scan(const Nat& p, unsigned i_max, const ClassifiedSegment& downward,
                                   const ScanOptions& opts = {}) {
  if (i_max < 1) throw domain_error("candidate_scan: i_max must be >= 1");
  if (!fits_u64(p)) throw domain_error("candidate_scan: subject beyond the classified domain");
  const std::uint64_t p64 = to_u64(p);
  if (downward.lo() > 2 || downward.hi() < p64) {
    throw domain_error("candidate_scan: classification must cover [2, " + to_string(p) + "]");
  }
  const KinshipStatus* status = downward.status_of(p64);
  if (!status) throw domain_error("candidate_scan: " + to_string(p) + " is not prime");
  if (is_brother(*status)) {
    throw domain_error("candidate_scan: " + to_string(p) +
                       " is a brother/sister prime; primes in B have no cousins");
  }

  SearchReport report;
  report.subject = p;
  report.i_max = i_max;
  report.reaches_full_budget = p <= i_max;

  auto finish_with = [&](const Nat& w, unsigned n) {
    report.outcome = SearchReport::Outcome::CousinFound;
    report.witness = w;
    report.witness_exponent = n;
    WitnessCertificate cert;
    cert.claim = WitnessCertificate::Claim::CousinPair;
    const Nat& lower = w < p ? w : p;
    const Nat& upper = w < p ? p : w;
    cert.subjects.push_back(neighborhood(lower, opts.primality));
    cert.subjects.push_back(neighborhood(upper, opts.primality));
    cert.pair_exponent = n;
    report.certificate = std::move(cert);
  };

  if (auto down = downward_witness(p64, downward)) {
    report.downward_witness = true;
    finish_with(to_nat(down->first), down->second);
    return report;
  }

  const unsigned batch = std::max(1u, opts.threads) * 4;
  for (unsigned start = 1; start <= i_max; start += batch) {
    unsigned stop = std::min(i_max, start + batch - 1);
    std::vector<SearchStep> chunk(stop - start + 1);
    if (opts.threads <= 1) {
      for (unsigned i = start; i <= stop; ++i) chunk[i - start] = detail::evaluate_step(p, i, opts.primality);
    } else {
      std::vector<std::future<SearchStep>> jobs;
      for (unsigned i = start; i <= stop; ++i) {
        jobs.push_back(std::async(std::launch::async, detail::evaluate_step, std::cref(p), i,
                                  std::cref(opts.primality)));
      }
      for (std::size_t k = 0; k < jobs.size(); ++k) chunk[k] = jobs[k].get();
    }
    for (auto& step : chunk) {
      bool hit = step.status == SearchStep::Status::PrimeInO;
      report.steps.push_back(std::move(step));
      if (hit && !report.witness) {
        const auto& last = report.steps.back();
        finish_with(last.value, last.exponent);
        if (!opts.full_scan) return report;
      }
    }
  }
  return report;
}

// Transcript lines: i=<i> value=<decimal> status=<composite|prime_in_B:brother=<decimal>|prime_in_O>
inline std::string format_step(const SearchStep& s) {
  std::ostringstream out;
  out << "i=" << s.exponent << " value=" << to_string(s.value) << " status=";
  switch (s.status) {
    case SearchStep::Status::Composite: out << "composite"; break;
    case SearchStep::Status::PrimeInB: out << "prime_in_B:brother=" << to_string(*s.brother); break;
    case SearchStep::Status::PrimeInO: out << "prime_in_O"; break;
  }
  return out.str();
}

inline std::string format_outcome(const SearchReport& r) {
  std::ostringstream out;
  if (r.outcome == SearchReport::Outcome::CousinFound) {
    out << "outcome=cousin_found witness=" << to_string(*r.witness) << " n=" << r.witness_exponent
        << " direction=" << (r.downward_witness ? "down" : "up");
  } else {
    out << "outcome=candidate_up_to i_max=" << r.i_max << " full_budget=" << (r.reaches_full_budget ? "yes" : "no");
  }
  return out.str();
}

inline std::string format_transcript(const SearchReport& r) {
  std::string out;
  for (const auto& s : r.steps) out += format_step(s) + "\n";
  out += format_outcome(r) + "\n";
  return out;
}

// Heuristic count of primes expected among p + 2^m, m = 1..i_max:
// sum of 1 / ((m + 1) ln 2). Diverges like log2(i_max).
inline double expected_hits(std::uint64_t i_max) {
  if (i_max < 1) throw domain_error("expected_hits: i_max must be >= 1");
  long double sum = 0;
  for (std::uint64_t m = i_max; m >= 1; --m) sum += 1.0L / static_cast<long double>(m + 1);
  return static_cast<double>(sum / std::log(2.0L));
}

// Replaces Unresolved O-statuses by the outcome of a candidate scan: a
// cousin witness, or IsolatedCandidate at the scanned budget.
template <std::invocable<const Nat&> BudgetFn>
ClassifiedSegment refine_with_scans(const ClassifiedSegment& seg, BudgetFn&& budget_for, const ScanOptions& opts = {}) {
  std::vector<KinshipStatus> statuses = seg.statuses();
  for (std::size_t i = 0; i < statuses.size(); ++i) {
    if (!std::holds_alternative<kinship::Unresolved>(statuses[i])) continue;
    const Nat p = to_nat(seg.primes()[i]);
    const unsigned budget = budget_for(p);
    auto report = candidate_scan(p, budget, seg, opts);
    if (report.outcome == SearchReport::Outcome::CousinFound) {
      statuses[i] = kinship::CousinResolved{*report.witness, report.witness_exponent};
    } else {
      statuses[i] = kinship::IsolatedCandidate{budget};
    }
  }
  return seg.with_statuses(std::move(statuses));
}

inline ClassifiedSegment refine_with_scans(const ClassifiedSegment& seg, const ScanOptions& opts = {}) {
  return refine_with_scans(seg, [](const Nat& p) { return default_budget(p).i_max; }, opts);
}

}  // namespace pkin

#endif  // PKIN_SEARCH_HPP
