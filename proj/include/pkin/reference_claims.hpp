#ifndef PKIN_REFERENCE_CLAIMS_HPP
#define PKIN_REFERENCE_CLAIMS_HPP

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pkin/classifier.hpp"
#include "pkin/report_format.hpp"
#include "pkin/search.hpp"
#include "pkin/segment_cache.hpp"
#include "pkin/wieferich.hpp"

namespace pkin {

// Golden transcripts of the published tables, in the CLI's output format.
struct ReferenceFixtures {
  std::string merged_listing_300;
  std::string brothers_1_10;
  std::string others_1_10;
  std::string transcript_53;
};

struct ClaimResult {
  std::string id;
  std::string description;
  bool skipped = false;
  bool passed = false;
  std::string detail;  // diff or failure reason
};

struct ClaimOptions {
  std::set<std::string> skip;  // tags: "big"
  const SegmentCache* cache = nullptr;
  std::uint64_t segment_width = std::uint64_t{1} << 24;
  ScanOptions scan;
};

// Line diff: "-expected" / "+actual" for every differing line.
inline std::string line_diff(const std::string& expected, const std::string& actual) {
  auto split = [](const std::string& s) {
    std::vector<std::string> lines;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    return lines;
  };
  auto e = split(expected);
  auto a = split(actual);
  std::string out;
  for (std::size_t i = 0; i < std::max(e.size(), a.size()); ++i) {
    const std::string* el = i < e.size() ? &e[i] : nullptr;
    const std::string* al = i < a.size() ? &a[i] : nullptr;
    if (el && al && *el == *al) continue;
    if (el) out += "-" + *el + "\n";
    if (al) out += "+" + *al + "\n";
  }
  return out;
}

namespace detail {

struct Claim {
  std::string id;
  std::string description;
  std::string tag;  // empty: always runs
  std::function<std::string()> check;  // empty string on success
};

inline std::string first_runs(const ClassifiedSegment& seg, RunKind kind, std::size_t count) {
  std::string out;
  for (const auto& run : seg.runs()) {
    if (run.kind != kind || count == 0) continue;
    out += format_run(run, seg.provisional_indices()) + "\n";
    --count;
  }
  return out;
}

inline std::string expect_cousin(const ClassifiedSegment& seg, std::uint64_t p, std::uint64_t witness, unsigned n) {
  const auto* s = seg.status_of(p);
  const auto* c = s ? std::get_if<kinship::CousinResolved>(s) : nullptr;
  if (!c) return std::to_string(p) + " not resolved as a cousin";
  if (c->witness != to_nat(witness) || c->exponent != n) {
    return std::to_string(p) + ": witness " + to_string(c->witness) + " n=" + std::to_string(c->exponent) +
           ", expected " + std::to_string(witness) + " n=" + std::to_string(n);
  }
  return {};
}

}  // namespace detail

inline std::vector<ClaimResult> run_reference_claims(const ReferenceFixtures& fx, const ClaimOptions& opts = {}) {
  auto classified = [&](std::uint64_t hi) {
    return resolve_cousins(load_or_classify(opts.cache, 2, hi, opts.segment_width).segment);
  };
  const auto& prim = opts.scan.primality;

  std::vector<detail::Claim> claims;
  claims.push_back({"merged_listing_300", "B_1..B_17 and O_1..O_6 up to 300", "", [&] {
                      return line_diff(fx.merged_listing_300, format_runs(classified(300)));
                    }});
  claims.push_back({"brothers_1_10", "first ten brother/sister runs", "", [&] {
                      return line_diff(fx.brothers_1_10, detail::first_runs(classified(600), RunKind::Brother, 10));
                    }});
  claims.push_back({"others_1_10", "first ten other-prime runs", "", [&] {
                      return line_diff(fx.others_1_10, detail::first_runs(classified(600), RunKind::Other, 10));
                    }});
  claims.push_back({"cousin_differences", "173-157=2^4, 541-509=2^5, 557-541=2^4, 563-547=2^4", "", [&] {
                      auto seg = classified(600);
                      for (auto e : {detail::expect_cousin(seg, 173, 157, 4), detail::expect_cousin(seg, 157, 173, 4),
                                     detail::expect_cousin(seg, 541, 509, 5), detail::expect_cousin(seg, 557, 541, 4),
                                     detail::expect_cousin(seg, 563, 547, 4)}) {
                        if (!e.empty()) return e;
                      }
                      return std::string{};
                    }});
  claims.push_back({"cousin_chains_600", "chains {157;173}, {509;541;557}, {547;563} present", "", [&] {
                      auto chains = cousin_run_report(classified(600));
                      std::vector<std::vector<std::uint64_t>> want = {{157, 173}, {509, 541, 557}, {547, 563}};
                      for (const auto& w : want) {
                        if (std::find(chains.begin(), chains.end(), w) == chains.end()) {
                          return "missing chain:\n" + format_chains({w}) + "report:\n" + format_chains(chains);
                        }
                      }
                      return std::string{};
                    }});
  claims.push_back({"relative_53", "53 has a prime at power-of-two distance", "", [&] {
                      auto w = is_relative(Nat(53), 8, prim);
                      if (!w) return std::string("no relative found");
                      if (w->partner != 61 || w->exponent != 3) return "unexpected partner " + to_string(w->partner);
                      return std::string{};
                    }});
  claims.push_back({"transcript_53", "53 + 2^i for i = 1..35", "", [&] {
                      auto report = candidate_scan(Nat(53), 35, classified(53), opts.scan);
                      return line_diff(fx.transcript_53, format_transcript(report));
                    }});
  claims.push_back({"no_brother_34359738421", "53 + 2^35 is prime and has no brother", "", [&] {
                      auto m = b_membership(Nat("34359738421"), prim);
                      if (m.in_b) return std::string("34359738421 classified in B");
                      return certificate_failure(m.certificate, prim);
                    }});
  claims.push_back({"candidate_211", "211 survives i = 1..211", "", [&] {
                      auto report = candidate_scan(Nat(211), 211, classified(211), opts.scan);
                      if (report.outcome != SearchReport::Outcome::CandidateUpTo) {
                        return "unexpected cousin " + to_string(*report.witness);
                      }
                      if (!report.reaches_full_budget) return std::string("budget below 211");
                      return std::string{};
                    }});
  claims.push_back({"cousin_211_448", "211 + 2^448 is the first upward O-partner of 211", "big", [&] {
                      auto report = candidate_scan(Nat(211), 448, classified(211), opts.scan);
                      Nat want = Nat(211) + pow2(448);
                      if (report.outcome != SearchReport::Outcome::CousinFound) return std::string("no cousin found");
                      if (*report.witness != want || report.witness_exponent != 448) {
                        return "witness at i=" + std::to_string(report.witness_exponent);
                      }
                      const auto& upper = report.certificate->subjects[1];
                      if (upper.verdict.kind != PrimalityVerdict::Kind::ProbablePrime ||
                          upper.verdict.error_bound_log2() > -128) {
                        return "witness verdict " + to_string(upper.verdict);
                      }
                      return certificate_failure(*report.certificate, prim);
                    }});
  claims.push_back({"wieferich_congruences", "2^1092 = 1 mod 1093^2 and 2^3510 = 1 mod 3511^2", "", [&] {
                      if (mod_pow(Nat(2), Nat(1092), Nat(1093 * 1093)) != 1) return std::string("1093 fails");
                      if (mod_pow(Nat(2), Nat(3510), Nat(3511 * 3511)) != 1) return std::string("3511 fails");
                      return std::string{};
                    }});
  claims.push_back({"wieferich_kinship", "1093 in B (brother 1091); 3511 in O, cousin 3511 + 2^44", "", [&] {
                      auto records = wieferich_scan(10000, {64, 1, opts.scan});
                      if (records.size() != 2 || records[0].p != 1093 || records[1].p != 3511) {
                        return std::string("scan to 10^4 did not return exactly {1093, 3511}");
                      }
                      const auto& w1 = records[0].kinship;
                      if (!w1.in_b || *w1.brother != 1091) return std::string("1093 not in B with brother 1091");
                      const auto& w2 = records[1];
                      if (w2.kinship.in_b) return std::string("3511 classified in B");
                      if (!w2.cousin_scan || w2.cousin_scan->outcome != SearchReport::Outcome::CousinFound ||
                          *w2.cousin_scan->witness != Nat("17592186047927") || w2.cousin_scan->witness_exponent != 44) {
                        return std::string("3511 cousin witness is not 3511 + 2^44");
                      }
                      return certificate_failure(*w2.cousin_scan->certificate, prim);
                    }});

  std::vector<ClaimResult> results;
  for (const auto& c : claims) {
    ClaimResult r;
    r.id = c.id;
    r.description = c.description;
    if (!c.tag.empty() && opts.skip.count(c.tag)) {
      r.skipped = true;
      r.passed = true;
    } else {
      r.detail = c.check();
      r.passed = r.detail.empty();
    }
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace pkin

#endif  // PKIN_REFERENCE_CLAIMS_HPP
