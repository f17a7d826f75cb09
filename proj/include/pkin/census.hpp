#ifndef PKIN_CENSUS_HPP
#define PKIN_CENSUS_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "pkin/classifier.hpp"
#include "pkin/errors.hpp"

namespace pkin {

inline constexpr std::string_view kCensusSchema = "pkin.census/1";

// Tally of primes by residue mod 4; 2 is in neither class.
struct ResidueTally {
  std::uint64_t one_mod_4 = 0;
  std::uint64_t three_mod_4 = 0;

  void add(std::uint64_t p) {
    if (p % 4 == 1) ++one_mod_4;
    if (p % 4 == 3) ++three_mod_4;
  }
  ResidueTally& operator+=(const ResidueTally& o) {
    one_mod_4 += o.one_mod_4;
    three_mod_4 += o.three_mod_4;
    return *this;
  }
  friend bool operator==(const ResidueTally&, const ResidueTally&) = default;
};

struct CensusReport {
  std::uint64_t lo = 0;
  std::uint64_t bound = 0;  // N
  std::uint64_t pi = 0;
  std::uint64_t pi_b = 0;
  std::uint64_t pi_o = 0;
  std::uint64_t pi_cousin_resolved = 0;
  // O-members with no in-bound partner. Includes isolated candidates, which
  // are additionally counted on their own.
  std::uint64_t pi_unresolved = 0;
  std::uint64_t pi_isolated_candidates = 0;
  std::uint64_t b_runs = 0;
  std::uint64_t o_runs = 0;
  std::uint64_t twin_pairs = 0;

  ResidueTally residues_all, residues_b, residues_o, residues_cousin, residues_unresolved;

  std::map<std::uint64_t, std::uint64_t> b_run_sizes;     // run length -> count
  std::map<std::uint64_t, std::uint64_t> inter_run_gaps;  // gap between adjacent runs -> count

  friend bool operator==(const CensusReport&, const CensusReport&) = default;
};

// One pass over a classified (and ideally cousin-resolved) segment.
inline CensusReport run_census(const ClassifiedSegment& seg) {
  CensusReport r;
  r.lo = seg.lo();
  r.bound = seg.hi();
  const auto& primes = seg.primes();
  const auto& status = seg.statuses();
  r.pi = primes.size();
  for (std::size_t i = 0; i < primes.size(); ++i) {
    const auto p = primes[i];
    r.residues_all.add(p);
    if (i + 1 < primes.size() && primes[i + 1] - p == 2) ++r.twin_pairs;
    if (is_brother(status[i])) {
      ++r.pi_b;
      r.residues_b.add(p);
      continue;
    }
    ++r.pi_o;
    r.residues_o.add(p);
    if (std::holds_alternative<kinship::CousinResolved>(status[i])) {
      ++r.pi_cousin_resolved;
      r.residues_cousin.add(p);
    } else {
      ++r.pi_unresolved;
      r.residues_unresolved.add(p);
      if (std::holds_alternative<kinship::IsolatedCandidate>(status[i])) ++r.pi_isolated_candidates;
    }
  }
  const auto& runs = seg.runs();
  for (std::size_t k = 0; k < runs.size(); ++k) {
    if (runs[k].kind == RunKind::Brother) {
      ++r.b_runs;
      ++r.b_run_sizes[runs[k].members.size()];
    } else {
      ++r.o_runs;
    }
    if (k + 1 < runs.size()) ++r.inter_run_gaps[runs[k + 1].members.front() - runs[k].members.back()];
  }
  return r;
}

// 2 * C2 as rounded in the residue-race argument.
inline constexpr double kTwinConstant = 1.320;

struct TwinDensity {
  std::uint64_t bound = 0;
  std::uint64_t twin_pairs = 0;
  double twin_constant = kTwinConstant;
  double estimate = 0;  // twin_constant * N / (ln N)^2
  double ratio = 0;     // twin_pairs / estimate
};

inline TwinDensity twin_density_check(const ClassifiedSegment& seg) {
  if (seg.primes().size() < 100) {
    throw domain_error("twin_density_check: only " + std::to_string(seg.primes().size()) +
                       " primes in range; need at least 100 for a meaningful ratio");
  }
  TwinDensity t;
  t.bound = seg.hi();
  const auto& primes = seg.primes();
  for (std::size_t i = 0; i + 1 < primes.size(); ++i) {
    if (primes[i + 1] - primes[i] == 2) ++t.twin_pairs;
  }
  const double n = static_cast<double>(t.bound);
  const double ln = std::log(n);
  t.estimate = t.twin_constant * n / (ln * ln);
  t.ratio = static_cast<double>(t.twin_pairs) / t.estimate;
  return t;
}

// Only the computable part of the set-cardinality marker: -1 for no member
// seen, 0 for members seen. Infinitude (1) is never observable from a finite
// range, so it is never produced.
enum class PsiMarker : int { EmptySoFar = -1, NonEmptyFiniteSoFar = 0 };

struct PsiEmpirical {
  PsiMarker b = PsiMarker::EmptySoFar;
  PsiMarker o = PsiMarker::EmptySoFar;
  PsiMarker cousins = PsiMarker::EmptySoFar;
  PsiMarker isolated_candidates = PsiMarker::EmptySoFar;
};

inline PsiMarker psi_marker(std::uint64_t count) {
  return count == 0 ? PsiMarker::EmptySoFar : PsiMarker::NonEmptyFiniteSoFar;
}

inline PsiEmpirical psi_empirical(const CensusReport& r) {
  return {psi_marker(r.pi_b), psi_marker(r.pi_o), psi_marker(r.pi_cousin_resolved),
          psi_marker(r.pi_isolated_candidates)};
}

// The twelve (psi(B), psi(C), psi(I)) combinations and the feasibility the
// heuristic arguments assign to them. Documentation only: none of these is
// computed, and none is established by any finite census.
struct KappaEntry {
  int psi_b, psi_c, psi_i;
  int feasible;
  std::string_view basis;
};

inline constexpr std::array<KappaEntry, 12> kKappaTable = {{
    {0, 0, -1, 0, "finitely many primes cannot cover an infinite set"},
    {0, 0, 0, 0, "finitely many primes cannot cover an infinite set"},
    {0, 0, 1, 0, "harmonic-series estimate: each isolated prime would need infinitely many B partners"},
    {0, 1, -1, 1, "not excluded"},
    {0, 1, 0, 0, "harmonic-series estimate"},
    {0, 1, 1, 0, "harmonic-series estimate"},
    {1, 0, -1, 0, "mod-4 residue race would be unbalanced"},
    {1, 0, 0, 0, "mod-4 residue race would be unbalanced"},
    {1, 0, 1, 0, "mod-4 residue race, stronger imbalance"},
    {1, 1, -1, 1, "not excluded"},
    {1, 1, 0, 1, "not excluded"},
    {1, 1, 1, 0, "mod-4 residue race with B dominating I and C"},
}};

namespace detail {

inline nlohmann::json tally_json(const ResidueTally& t) {
  return {{"1mod4", t.one_mod_4}, {"3mod4", t.three_mod_4}};
}

inline nlohmann::json histogram_json(const std::map<std::uint64_t, std::uint64_t>& h) {
  auto arr = nlohmann::json::array();
  for (auto [k, v] : h) arr.push_back({k, v});
  return arr;
}

inline std::string marker_name(PsiMarker m) { return m == PsiMarker::EmptySoFar ? "-1" : "0"; }

}  // namespace detail

inline nlohmann::json census_json(const CensusReport& r) {
  auto psi = psi_empirical(r);
  return {
      {"schema", kCensusSchema},
      {"lo", r.lo},
      {"bound", r.bound},
      {"pi", r.pi},
      {"pi_B", r.pi_b},
      {"pi_O", r.pi_o},
      {"pi_cousin_resolved", r.pi_cousin_resolved},
      {"pi_unresolved", r.pi_unresolved},
      {"pi_isolated_candidates", r.pi_isolated_candidates},
      {"b_runs", r.b_runs},
      {"o_runs", r.o_runs},
      {"twin_pairs", r.twin_pairs},
      {"residues",
       {{"all", detail::tally_json(r.residues_all)},
        {"B", detail::tally_json(r.residues_b)},
        {"O", detail::tally_json(r.residues_o)},
        {"cousin_resolved", detail::tally_json(r.residues_cousin)},
        {"unresolved", detail::tally_json(r.residues_unresolved)}}},
      {"b_run_sizes", detail::histogram_json(r.b_run_sizes)},
      {"inter_run_gaps", detail::histogram_json(r.inter_run_gaps)},
      {"psi_empirical",
       {{"B", static_cast<int>(psi.b)},
        {"O", static_cast<int>(psi.o)},
        {"C", static_cast<int>(psi.cousins)},
        {"I_candidates", static_cast<int>(psi.isolated_candidates)}}},
  };
}

// key: value lines; histograms as indented "<key> <count>" pairs.
inline std::string census_text(const CensusReport& r) {
  std::ostringstream out;
  auto psi = psi_empirical(r);
  auto tally = [&](std::string_view name, const ResidueTally& t) {
    out << "residues_" << name << ": " << t.one_mod_4 << " " << t.three_mod_4 << "\n";
  };
  out << "schema: " << kCensusSchema << "\n"
      << "lo: " << r.lo << "\n"
      << "bound: " << r.bound << "\n"
      << "pi: " << r.pi << "\n"
      << "pi_B: " << r.pi_b << "\n"
      << "pi_O: " << r.pi_o << "\n"
      << "pi_cousin_resolved: " << r.pi_cousin_resolved << "\n"
      << "pi_unresolved: " << r.pi_unresolved << "\n"
      << "pi_isolated_candidates: " << r.pi_isolated_candidates << "\n"
      << "b_runs: " << r.b_runs << "\n"
      << "o_runs: " << r.o_runs << "\n"
      << "twin_pairs: " << r.twin_pairs << "\n";
  tally("all", r.residues_all);
  tally("B", r.residues_b);
  tally("O", r.residues_o);
  tally("cousin_resolved", r.residues_cousin);
  tally("unresolved", r.residues_unresolved);
  out << "psi_B: " << detail::marker_name(psi.b) << "\n"
      << "psi_O: " << detail::marker_name(psi.o) << "\n"
      << "psi_C: " << detail::marker_name(psi.cousins) << "\n"
      << "psi_I_candidates: " << detail::marker_name(psi.isolated_candidates) << "\n";
  out << "b_run_sizes:\n";
  for (auto [k, v] : r.b_run_sizes) out << "  " << k << " " << v << "\n";
  out << "inter_run_gaps:\n";
  for (auto [k, v] : r.inter_run_gaps) out << "  " << k << " " << v << "\n";
  return out.str();
}

}  // namespace pkin

#endif  // PKIN_CENSUS_HPP
