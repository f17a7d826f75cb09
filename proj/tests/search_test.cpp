#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "pkin/report_format.hpp"
#include "pkin/search.hpp"

namespace pkin {
namespace {

using Status = SearchStep::Status;

std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(PKIN_FIXTURE_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const ClassifiedSegment& segment_to_600() {
  static const ClassifiedSegment seg = resolve_cousins(classify_range(2, 600));
  return seg;
}

TEST(BMembership, PublishedWitnessHasNoBrother) {
  auto m = b_membership(Nat("34359738421"));
  EXPECT_FALSE(m.in_b);
  EXPECT_EQ(m.certificate.claim, WitnessCertificate::Claim::InO);
  EXPECT_TRUE(verify_certificate(m.certificate));
}

TEST(BMembership, WieferichPrimes) {
  auto w1 = b_membership(Nat(1093));
  EXPECT_TRUE(w1.in_b);
  EXPECT_EQ(*w1.brother, 1091);
  EXPECT_EQ(w1.exponent, 1u);

  auto w2 = b_membership(Nat(3511));
  EXPECT_FALSE(w2.in_b);
  const auto& hood = w2.certificate.subjects.at(0);
  // Neighbours from the sieve oracle.
  auto primes = oracle::primes_upto(4000);
  auto it = std::lower_bound(primes.begin(), primes.end(), 3511);
  EXPECT_EQ(hood.below->prime, to_nat(*(it - 1)));
  EXPECT_EQ(hood.above.prime, to_nat(*(it + 1)));
  EXPECT_EQ(hood.below->gap, 12);
  EXPECT_EQ(hood.above.gap, 6);
}

TEST(BMembership, TwoAndCompositeInputs) {
  auto two = b_membership(Nat(2));
  EXPECT_TRUE(two.in_b);
  EXPECT_EQ(*two.brother, 3);
  EXPECT_EQ(two.exponent, 0u);
  EXPECT_TRUE(verify_certificate(two.certificate));
  EXPECT_THROW(b_membership(Nat(1001)), domain_error);
}

TEST(BMembership, AgreesWithClassifier) {
  auto seg = classify_range(2, 20000);
  for (auto p : seg.primes()) {
    ASSERT_EQ(b_membership(to_nat(p)).in_b, seg.in_brothers(p)) << p;
  }
}

TEST(Certificate, TamperedCertificatesFail) {
  auto m = b_membership(Nat(3511));
  ASSERT_TRUE(verify_certificate(m.certificate));

  auto wrong_claim = m.certificate;
  wrong_claim.claim = WitnessCertificate::Claim::InB;
  EXPECT_FALSE(verify_certificate(wrong_claim));

  auto skipped_prime = m.certificate;
  skipped_prime.subjects[0].above = {Nat(3527), PrimalityVerdict::proven(), Nat(16), 4u};  // 3517 lies between
  EXPECT_NE(certificate_failure(skipped_prime).find("lies between"), std::string::npos);

  auto bad_gap = m.certificate;
  bad_gap.subjects[0].below->gap = 8;
  EXPECT_FALSE(verify_certificate(bad_gap));
}

TEST(CandidateScan, FiftyThreeTranscript) {
  auto report = candidate_scan(Nat(53), 35, segment_to_600());
  ASSERT_EQ(report.steps.size(), 35u);
  EXPECT_EQ(format_transcript(report), read_fixture("search_53_35.txt"));

  std::map<unsigned, std::uint64_t> in_b = {{3, 59}, {7, 179}, {19, 524309}, {27, 134217779}};
  for (const auto& s : report.steps) {
    ASSERT_EQ(s.value, Nat(53) + pow2(s.exponent));
    if (in_b.count(s.exponent)) {
      EXPECT_EQ(s.status, Status::PrimeInB) << s.exponent;
      EXPECT_EQ(*s.brother, to_nat(in_b[s.exponent]));
    } else if (s.exponent == 35) {
      EXPECT_EQ(s.status, Status::PrimeInO);
    } else {
      EXPECT_EQ(s.status, Status::Composite) << s.exponent;
    }
  }
  EXPECT_EQ(report.outcome, SearchReport::Outcome::CousinFound);
  EXPECT_EQ(*report.witness, Nat("34359738421"));
  EXPECT_EQ(report.witness_exponent, 35u);
  ASSERT_TRUE(report.certificate);
  EXPECT_TRUE(verify_certificate(*report.certificate));
}

TEST(CandidateScan, TwoHundredElevenIsACandidateToItsOwnBudget) {
  auto report = candidate_scan(Nat(211), 211, segment_to_600());
  EXPECT_EQ(report.outcome, SearchReport::Outcome::CandidateUpTo);
  EXPECT_TRUE(report.reaches_full_budget);
  ASSERT_EQ(report.steps.size(), 211u);
  for (unsigned i = 0; i < report.steps.size(); ++i) {
    ASSERT_EQ(report.steps[i].exponent, i + 1);
    ASSERT_NE(report.steps[i].status, Status::PrimeInO);
  }
}

TEST(CandidateScan, TwoHundredElevenCousinAt448) {
  auto report = candidate_scan(Nat(211), 448, segment_to_600());
  ASSERT_EQ(report.outcome, SearchReport::Outcome::CousinFound);
  EXPECT_EQ(*report.witness, Nat(211) + pow2(448));
  EXPECT_EQ(report.witness_exponent, 448u);
  EXPECT_EQ(report.steps.back().status, Status::PrimeInO);
  const auto& upper = report.certificate->subjects[1];
  EXPECT_EQ(upper.verdict.kind, PrimalityVerdict::Kind::ProbablePrime);
  EXPECT_FALSE(upper.in_b());
  EXPECT_TRUE(verify_certificate(*report.certificate));
}

TEST(CandidateScan, PreconditionsAreEnforced) {
  const auto& seg = segment_to_600();
  EXPECT_THROW(candidate_scan(Nat(59), 10, seg), domain_error);   // in B
  EXPECT_THROW(candidate_scan(Nat(55), 10, seg), domain_error);   // composite
  EXPECT_THROW(candidate_scan(Nat(53), 0, seg), domain_error);
  EXPECT_THROW(candidate_scan(Nat(53), 5, classify_range(40, 600)), domain_error);
  EXPECT_THROW(candidate_scan(Nat(701), 5, seg), domain_error);  // beyond the classification
}

TEST(CandidateScan, DownwardWitnessEndsTheScan) {
  auto report = candidate_scan(Nat(173), 64, segment_to_600());
  EXPECT_TRUE(report.downward_witness);
  EXPECT_TRUE(report.steps.empty());
  EXPECT_EQ(*report.witness, 157);
  EXPECT_EQ(report.witness_exponent, 4u);
  EXPECT_TRUE(verify_certificate(*report.certificate));
}

TEST(CandidateScan, DownwardClauseMatchesBruteForce) {
  auto seg = classify_range(2, 10000);
  std::vector<std::uint64_t> others;
  for (auto p : seg.primes()) {
    if (seg.in_others(p)) others.push_back(p);
  }
  for (std::size_t i = 0; i < others.size(); ++i) {
    std::optional<std::uint64_t> brute;
    for (std::size_t j = 0; j < i; ++j) {
      if (oracle::single_bit(others[i] - others[j])) {
        if (!brute || others[i] - others[j] < others[i] - *brute) brute = others[j];
      }
    }
    auto ours = downward_witness(others[i], seg);
    ASSERT_EQ(ours.has_value(), brute.has_value()) << others[i];
    if (ours) {
      ASSERT_EQ(ours->first, *brute);
    }
  }
}

TEST(CandidateScan, DeterministicAcrossThreadCounts) {
  ScanOptions one, many;
  many.threads = 6;
  auto a = candidate_scan(Nat(211), 300, segment_to_600(), one);
  auto b = candidate_scan(Nat(211), 300, segment_to_600(), many);
  EXPECT_EQ(a.steps, b.steps);
  EXPECT_EQ(format_transcript(a), format_transcript(b));
  auto c = candidate_scan(Nat(53), 64, segment_to_600(), many);
  EXPECT_EQ(c.steps.size(), 35u);  // early stop still at the smallest i
}

TEST(CandidateScan, MonotoneRefinement) {
  const auto& seg = segment_to_600();
  auto at35 = candidate_scan(Nat(53), 35, seg);
  for (unsigned budget : {36u, 50u, 64u, 120u}) {
    auto r = candidate_scan(Nat(53), budget, seg);
    EXPECT_EQ(*r.witness, *at35.witness);
    EXPECT_EQ(r.witness_exponent, 35u);
  }
  auto at34 = candidate_scan(Nat(53), 34, seg);
  EXPECT_EQ(at34.outcome, SearchReport::Outcome::CandidateUpTo);
  EXPECT_FALSE(at34.reaches_full_budget);
}

TEST(CandidateScan, FullScanContinuesPastWitness) {
  ScanOptions full;
  full.full_scan = true;
  auto r = candidate_scan(Nat(53), 40, segment_to_600(), full);
  EXPECT_EQ(r.steps.size(), 40u);
  EXPECT_EQ(r.witness_exponent, 35u);
}

TEST(DefaultBudget, FollowsSubjectSize) {
  EXPECT_EQ(default_budget(Nat(53)).i_max, 64u);
  EXPECT_EQ(default_budget(Nat(211)).i_max, 211u);
  EXPECT_TRUE(default_budget(Nat(211)).reaches_full_budget);
  EXPECT_EQ(default_budget(Nat(3511)).i_max, 512u);
  EXPECT_FALSE(default_budget(Nat(3511)).reaches_full_budget);
}

TEST(ExpectedHits, MatchesHighPrecisionSummation) {
  for (std::uint64_t n : {1ull, 35ull, 1000000ull}) {
    double ref = oracle::harmonic_estimator(n);
    EXPECT_NEAR(expected_hits(n), ref, std::abs(ref) * 1e-10) << n;
  }
  EXPECT_NEAR(expected_hits(1), 0.7213475204444817, 1e-15);
  EXPECT_NEAR(expected_hits(35), 4.579920810224077, 1e-12);
  EXPECT_GT(expected_hits(1000000), 19.0);
  EXPECT_THROW(expected_hits(0), domain_error);
}

TEST(ExpectedHits, IncreasingAboveHarmonicLowerBound) {
  double prev = 0;
  for (std::uint64_t n = 1; n <= 5000; ++n) {
    double v = expected_hits(n);
    ASSERT_GT(v, prev);
    if (n >= 10) {
      ASSERT_GT(v, (std::log(static_cast<double>(n)) - 1) / std::log(2.0));
    }
    prev = v;
  }
}

TEST(RefineWithScans, ResolvesOrMarksCandidates) {
  auto seg = refine_with_scans(resolve_cousins(classify_range(2, 300)));
  auto c53 = std::get<kinship::CousinResolved>(*seg.status_of(53));
  EXPECT_EQ(c53.witness, Nat("34359738421"));
  EXPECT_EQ(c53.exponent, 35u);
  auto c211 = std::get<kinship::IsolatedCandidate>(*seg.status_of(211));
  EXPECT_EQ(c211.budget, 211u);
  for (std::size_t i = 0; i < seg.statuses().size(); ++i) {
    ASSERT_FALSE(std::holds_alternative<kinship::Unresolved>(seg.statuses()[i])) << seg.primes()[i];
  }
}

TEST(SearchJson, CarriesCertificate) {
  auto j = search_json(candidate_scan(Nat(53), 35, segment_to_600()));
  EXPECT_EQ(j["schema"], "pkin.search/1");
  EXPECT_EQ(j["outcome"], "cousin_found");
  EXPECT_EQ(j["witness"], "34359738421");
  EXPECT_EQ(j["steps"].size(), 35u);
  EXPECT_EQ(j["steps"][2]["brother"], "59");
  EXPECT_EQ(j["certificate"]["claim"], "cousin_pair");
}

}  // namespace
}  // namespace pkin
