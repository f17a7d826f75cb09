#ifndef PKIN_CLASSIFIER_HPP
#define PKIN_CLASSIFIER_HPP

#include <algorithm>
#include <atomic>
#include <bit>
#include <climits>
#include <cstdint>
#include <future>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "pkin/core_arith.hpp"
#include "pkin/errors.hpp"
#include "pkin/nat.hpp"
#include "pkin/sieve.hpp"

namespace pkin {

enum class RunKind : char { Brother = 'B', Other = 'O' };

// A maximal run of consecutive primes. Brother runs: every adjacent gap is a
// power of two and neither boundary gap is. Other runs: consecutive primes
// none of which has a power-of-two gap to either neighbour.
struct Run {
  RunKind kind = RunKind::Other;
  std::size_t index = 0;  // 1-based ordinal among runs of the same kind
  std::vector<std::uint64_t> members;

  friend bool operator==(const Run&, const Run&) = default;
};

namespace kinship {

struct Brother {
  std::size_t run = 0;
  friend bool operator==(const Brother&, const Brother&) = default;
};

struct CousinResolved {
  Nat witness;
  unsigned exponent = 0;
  friend bool operator==(const CousinResolved&, const CousinResolved&) = default;
};

// Survived the downward check and an upward scan of p + 2^i for i <= budget.
struct IsolatedCandidate {
  unsigned budget = 0;
  friend bool operator==(const IsolatedCandidate&, const IsolatedCandidate&) = default;
};

// No power-of-two O-partner within the information searched so far.
struct Unresolved {
  unsigned budget = 0;
  friend bool operator==(const Unresolved&, const Unresolved&) = default;
};

}  // namespace kinship

using KinshipStatus =
    std::variant<kinship::Brother, kinship::CousinResolved, kinship::IsolatedCandidate, kinship::Unresolved>;

inline bool is_brother(const KinshipStatus& s) { return std::holds_alternative<kinship::Brother>(s); }

struct ClassifyOptions {
  // Primes of look-around on each side. One suffices: B-membership depends
  // only on the immediate neighbours.
  std::size_t context_margin = 1;
  // Largest hi - lo handled in one piece; beyond this use classify_segmented.
  std::uint64_t max_span = std::uint64_t{1} << 32;
};

// Every prime of [lo, hi] labelled and grouped into runs. Immutable; the
// operations that refine statuses return a new segment.
class ClassifiedSegment {
 public:
  ClassifiedSegment() = default;

  ClassifiedSegment(std::uint64_t lo, std::uint64_t hi, std::vector<Run> runs, bool provisional_indices)
      : lo_(lo), hi_(hi), runs_(std::move(runs)), provisional_(provisional_indices) {
    std::uint64_t last = 0;
    for (const auto& run : runs_) {
      if (run.members.empty()) throw data_error("classified segment contains an empty run");
      for (auto p : run.members) {
        if (p < lo_ || p > hi_ || p <= last) throw data_error("classified segment members out of order or range");
        last = p;
        primes_.push_back(p);
        status_.push_back(run.kind == RunKind::Brother ? KinshipStatus{kinship::Brother{run.index}}
                                                       : KinshipStatus{kinship::Unresolved{0}});
      }
    }
  }

  std::uint64_t lo() const { return lo_; }
  std::uint64_t hi() const { return hi_; }
  const std::vector<Run>& runs() const { return runs_; }
  const std::vector<std::uint64_t>& primes() const { return primes_; }
  const std::vector<KinshipStatus>& statuses() const { return status_; }
  bool provisional_indices() const { return provisional_; }
  bool empty() const { return primes_.empty(); }

  std::optional<std::size_t> position(std::uint64_t p) const {
    auto it = std::lower_bound(primes_.begin(), primes_.end(), p);
    if (it == primes_.end() || *it != p) return std::nullopt;
    return static_cast<std::size_t>(it - primes_.begin());
  }

  bool contains(std::uint64_t p) const { return position(p).has_value(); }

  const KinshipStatus* status_of(std::uint64_t p) const {
    auto pos = position(p);
    return pos ? &status_[*pos] : nullptr;
  }

  bool in_brothers(std::uint64_t p) const {
    auto s = status_of(p);
    return s && is_brother(*s);
  }

  bool in_others(std::uint64_t p) const {
    auto s = status_of(p);
    return s && !is_brother(*s);
  }

  ClassifiedSegment with_statuses(std::vector<KinshipStatus> statuses) const {
    if (statuses.size() != primes_.size()) throw domain_error("status vector does not match segment");
    for (std::size_t i = 0; i < statuses.size(); ++i) {
      if (is_brother(statuses[i]) != is_brother(status_[i])) {
        throw domain_error("status update would move prime " + std::to_string(primes_[i]) + " between B and O");
      }
    }
    ClassifiedSegment copy = *this;
    copy.status_ = std::move(statuses);
    return copy;
  }

  friend bool operator==(const ClassifiedSegment&, const ClassifiedSegment&) = default;

 private:
  std::uint64_t lo_ = 0;
  std::uint64_t hi_ = 0;
  std::vector<Run> runs_;
  std::vector<std::uint64_t> primes_;
  std::vector<KinshipStatus> status_;
  bool provisional_ = false;
};

namespace detail {

inline bool gap_is_power_of_two(std::uint64_t a, std::uint64_t b) { return is_power_of_two(b - a); }

// Groups labelled primes into maximal runs and numbers them from the given
// starting ordinals.
inline std::vector<Run> build_runs(const std::vector<std::uint64_t>& primes, const std::vector<bool>& brother,
                                   std::size_t next_b = 1, std::size_t next_o = 1) {
  std::vector<Run> runs;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    RunKind kind = brother[i] ? RunKind::Brother : RunKind::Other;
    bool extend = false;
    if (!runs.empty() && runs.back().kind == kind) {
      extend = kind == RunKind::Other || gap_is_power_of_two(runs.back().members.back(), primes[i]);
    }
    if (extend) {
      runs.back().members.push_back(primes[i]);
    } else {
      runs.push_back(Run{kind, kind == RunKind::Brother ? next_b++ : next_o++, {primes[i]}});
    }
  }
  return runs;
}

}  // namespace detail

// Labels every prime of [lo, hi] as brother/sister (B) or other (O) and
// groups them into maximal runs. Run ordinals are global when lo <= 2 and
// provisional otherwise.
inline ClassifiedSegment classify_range(std::uint64_t lo, std::uint64_t hi, const ClassifyOptions& opts = {}) {
  if (lo < 2) throw domain_error("classify_range: lo must be >= 2");
  if (hi < lo) throw domain_error("classify_range: hi < lo");
  if (opts.context_margin < 1) throw domain_error("classify_range: context margin must be >= 1");
  if (hi - lo > opts.max_span) {
    throw resource_error("classify_range: span " + std::to_string(hi - lo) + " exceeds the configured ceiling " +
                         std::to_string(opts.max_span) + "; classify in segments");
  }

  auto primes = primes_between(lo, hi);

  // Look-behind and look-ahead context.
  std::vector<std::uint64_t> before;
  for (std::uint64_t p = lo; before.size() < opts.context_margin && p > 2;) {
    p = prev_prime(p);
    before.push_back(p);
  }
  std::vector<std::uint64_t> after;
  for (std::uint64_t p = hi; after.size() < opts.context_margin;) {
    p = next_prime(p);
    after.push_back(p);
  }

  std::vector<bool> brother(primes.size(), false);
  for (std::size_t i = 0; i < primes.size(); ++i) {
    std::optional<std::uint64_t> left;
    if (i > 0) {
      left = primes[i - 1];
    } else if (!before.empty()) {
      left = before.front();
    }
    std::uint64_t right = i + 1 < primes.size() ? primes[i + 1] : after.front();
    brother[i] = (left && detail::gap_is_power_of_two(*left, primes[i])) ||
                 detail::gap_is_power_of_two(primes[i], right);
  }
  return ClassifiedSegment(lo, hi, detail::build_runs(primes, brother), lo > 2);
}

// Joins two classifications of adjacent ranges. Runs cut by the shared
// boundary are merged and ordinals are renumbered from the left segment.
inline ClassifiedSegment stitch(const ClassifiedSegment& left, const ClassifiedSegment& right) {
  if (right.lo() != left.hi() + 1) throw domain_error("stitch: segments are not adjacent");

  std::vector<std::uint64_t> primes;
  std::vector<bool> brother;
  for (const auto* seg : {&left, &right}) {
    for (const auto& run : seg->runs()) {
      for (auto p : run.members) {
        primes.push_back(p);
        brother.push_back(run.kind == RunKind::Brother);
      }
    }
  }
  std::size_t first_b = 1, first_o = 1;
  for (const auto& run : left.runs()) {
    if (run.kind == RunKind::Brother) {
      first_b = run.index;
      break;
    }
  }
  for (const auto& run : left.runs()) {
    if (run.kind == RunKind::Other) {
      first_o = run.index;
      break;
    }
  }
  ClassifiedSegment joined(left.lo(), right.hi(), detail::build_runs(primes, brother, first_b, first_o),
                           left.provisional_indices());

  // Carry refined statuses over; brother statuses follow the renumbered runs.
  std::vector<KinshipStatus> statuses = joined.statuses();
  std::size_t k = 0;
  for (const auto* seg : {&left, &right}) {
    for (const auto& s : seg->statuses()) {
      if (!is_brother(s)) statuses[k] = s;
      ++k;
    }
  }
  return joined.with_statuses(std::move(statuses));
}

// Classifies [lo, hi] in pieces of at most segment_width numbers, optionally
// on several threads, and stitches the pieces in order.
inline ClassifiedSegment classify_segmented(std::uint64_t lo, std::uint64_t hi, std::uint64_t segment_width,
                                            unsigned threads = 1, const ClassifyOptions& opts = {}) {
  if (segment_width == 0) throw domain_error("classify_segmented: segment width must be positive");
  if (hi < lo) throw domain_error("classify_segmented: hi < lo");
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pieces;
  for (std::uint64_t a = lo;; a += segment_width) {
    std::uint64_t b = (hi - a < segment_width - 1) ? hi : a + segment_width - 1;
    pieces.emplace_back(a, b);
    if (b == hi) break;
  }
  std::vector<ClassifiedSegment> parts(pieces.size());
  if (threads <= 1 || pieces.size() == 1) {
    for (std::size_t i = 0; i < pieces.size(); ++i) parts[i] = classify_range(pieces[i].first, pieces[i].second, opts);
  } else {
    std::vector<std::future<void>> jobs;
    std::atomic<std::size_t> next{0};
    for (unsigned t = 0; t < threads; ++t) {
      jobs.push_back(std::async(std::launch::async, [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < pieces.size();) {
          parts[i] = classify_range(pieces[i].first, pieces[i].second, opts);
        }
      }));
    }
    for (auto& j : jobs) j.get();
  }
  ClassifiedSegment out = std::move(parts.front());
  for (std::size_t i = 1; i < parts.size(); ++i) out = stitch(out, parts[i]);
  return out;
}

// Largest n with 2^n <= width, i.e. the exponent range searched in-bound.
inline unsigned in_bound_exponents(std::uint64_t width) {
  return width == 0 ? 0 : static_cast<unsigned>(std::bit_width(width) - 1);
}

// Looks for a power-of-two partner among the O-members of the segment. The
// nearest partner below is preferred; otherwise the nearest above.
inline ClassifiedSegment resolve_cousins(const ClassifiedSegment& seg) {
  std::unordered_set<std::uint64_t> others;
  for (std::size_t i = 0; i < seg.primes().size(); ++i) {
    if (!is_brother(seg.statuses()[i])) others.insert(seg.primes()[i]);
  }
  const std::uint64_t width = seg.hi() - seg.lo();
  const unsigned max_n = in_bound_exponents(width);

  std::vector<KinshipStatus> statuses = seg.statuses();
  for (std::size_t i = 0; i < statuses.size(); ++i) {
    if (is_brother(statuses[i])) continue;
    if (std::holds_alternative<kinship::CousinResolved>(statuses[i])) continue;
    const std::uint64_t p = seg.primes()[i];
    std::optional<kinship::CousinResolved> found;
    for (unsigned n = 0; n <= max_n && !found; ++n) {
      std::uint64_t d = std::uint64_t{1} << n;
      if (p >= d + seg.lo() && others.count(p - d)) found = kinship::CousinResolved{to_nat(p - d), n};
    }
    for (unsigned n = 0; n <= max_n && !found; ++n) {
      std::uint64_t d = std::uint64_t{1} << n;
      if (p + d <= seg.hi() && others.count(p + d)) found = kinship::CousinResolved{to_nat(p + d), n};
    }
    if (found) {
      statuses[i] = std::move(*found);
    } else if (auto* u = std::get_if<kinship::Unresolved>(&statuses[i])) {
      u->budget = std::max(u->budget, max_n);
    }
  }
  return seg.with_statuses(std::move(statuses));
}

// Connected components of the power-of-two link graph over O-members of the
// segment, each sorted ascending, ordered by smallest member. Only primes
// with at least one in-segment link appear.
inline std::vector<std::vector<std::uint64_t>> cousin_run_report(const ClassifiedSegment& seg) {
  std::vector<std::uint64_t> others;
  for (std::size_t i = 0; i < seg.primes().size(); ++i) {
    if (!is_brother(seg.statuses()[i])) others.push_back(seg.primes()[i]);
  }
  std::vector<std::size_t> parent(others.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<bool> linked(others.size(), false);
  for (std::size_t i = 0; i < others.size(); ++i) {
    for (unsigned n = 0; n < 63; ++n) {
      std::uint64_t d = std::uint64_t{1} << n;
      if (d > seg.hi() - seg.lo()) break;
      std::uint64_t q = others[i] + d;
      auto it = std::lower_bound(others.begin(), others.end(), q);
      if (it != others.end() && *it == q) {
        auto j = static_cast<std::size_t>(it - others.begin());
        linked[i] = linked[j] = true;
        parent[find(i)] = find(j);
      }
    }
  }
  std::vector<std::vector<std::uint64_t>> chains;
  std::vector<std::size_t> chain_of(others.size(), SIZE_MAX);
  for (std::size_t i = 0; i < others.size(); ++i) {
    if (!linked[i]) continue;
    auto root = find(i);
    if (chain_of[root] == SIZE_MAX) {
      chain_of[root] = chains.size();
      chains.emplace_back();
    }
    chains[chain_of[root]].push_back(others[i]);
  }
  return chains;
}

struct RelativeWitness {
  Nat partner;
  unsigned exponent = 0;
};

// Any prime at distance 2^n, n <= bound_n, in either direction; brothers
// count. Smallest n wins, the lower partner first on ties.
inline std::optional<RelativeWitness> is_relative(const Nat& p, unsigned bound_n, const PrimalityOptions& opts = {}) {
  if (!is_prime(p, opts)) throw domain_error("is_relative: " + to_string(p) + " is not prime");
  for (unsigned n = 0; n <= bound_n; ++n) {
    Nat d = pow2(n);
    if (p - d >= 2 && is_prime(Nat(p - d), opts)) return RelativeWitness{p - d, n};
    if (is_prime(Nat(p + d), opts)) return RelativeWitness{p + d, n};
  }
  return std::nullopt;
}

}  // namespace pkin

#endif  // PKIN_CLASSIFIER_HPP
