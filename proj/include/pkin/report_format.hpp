#ifndef PKIN_REPORT_FORMAT_HPP
#define PKIN_REPORT_FORMAT_HPP

#include <sstream>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "pkin/classifier.hpp"
#include "pkin/search.hpp"

namespace pkin {

inline constexpr std::string_view kClassifySchema = "pkin.classify/1";
inline constexpr std::string_view kSearchSchema = "pkin.search/1";

// "B_3 = {37; 41; 43; 47}". Provisional ordinals are bracketed: "B_(3)".
inline std::string format_run(const Run& run, bool provisional) {
  std::ostringstream out;
  out << static_cast<char>(run.kind) << '_';
  if (provisional) {
    out << '(' << run.index << ')';
  } else {
    out << run.index;
  }
  out << " = {";
  for (std::size_t i = 0; i < run.members.size(); ++i) out << (i ? "; " : "") << run.members[i];
  out << '}';
  return out.str();
}

inline std::string format_runs(const ClassifiedSegment& seg) {
  std::string out;
  for (const auto& run : seg.runs()) out += format_run(run, seg.provisional_indices()) + "\n";
  return out;
}

inline std::string format_chains(const std::vector<std::vector<std::uint64_t>>& chains) {
  std::string out;
  for (std::size_t i = 0; i < chains.size(); ++i) {
    out += "C_" + std::to_string(i + 1) + " = {";
    for (std::size_t k = 0; k < chains[i].size(); ++k) out += (k ? "; " : "") + std::to_string(chains[i][k]);
    out += "}\n";
  }
  return out;
}

inline nlohmann::json status_json(const KinshipStatus& s) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, kinship::Brother>) {
          return {{"status", "brother"}, {"run", v.run}};
        } else if constexpr (std::is_same_v<T, kinship::CousinResolved>) {
          return {{"status", "cousin_resolved"}, {"witness", to_string(v.witness)}, {"n", v.exponent}};
        } else if constexpr (std::is_same_v<T, kinship::IsolatedCandidate>) {
          return {{"status", "isolated_candidate"}, {"budget", v.budget}};
        } else {
          return {{"status", "unresolved"}, {"budget", v.budget}};
        }
      },
      s);
}

inline nlohmann::json segment_json(const ClassifiedSegment& seg) {
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& run : seg.runs()) {
    runs.push_back({{"kind", std::string(1, static_cast<char>(run.kind))},
                    {"index", run.index},
                    {"members", run.members}});
  }
  nlohmann::json others = nlohmann::json::array();
  for (std::size_t i = 0; i < seg.primes().size(); ++i) {
    if (is_brother(seg.statuses()[i])) continue;
    auto entry = status_json(seg.statuses()[i]);
    entry["p"] = seg.primes()[i];
    others.push_back(std::move(entry));
  }
  return {{"schema", kClassifySchema}, {"lo", seg.lo()},        {"hi", seg.hi()},
          {"provisional_indices", seg.provisional_indices()}, {"runs", runs}, {"others", others},
          {"cousin_chains", cousin_run_report(seg)}};
}

inline std::string step_status_name(SearchStep::Status s) {
  switch (s) {
    case SearchStep::Status::Composite: return "composite";
    case SearchStep::Status::PrimeInB: return "prime_in_B";
    case SearchStep::Status::PrimeInO: return "prime_in_O";
  }
  return "?";
}

inline nlohmann::json neighborhood_json(const PrimeNeighborhood& n) {
  auto side = [](const NeighborGap& g) {
    nlohmann::json j = {{"prime", to_string(g.prime)}, {"verdict", to_string(g.verdict)}, {"gap", to_string(g.gap)}};
    j["power_of_two_exponent"] = g.exponent ? nlohmann::json(*g.exponent) : nlohmann::json(nullptr);
    return j;
  };
  nlohmann::json j = {{"value", to_string(n.value)}, {"verdict", to_string(n.verdict)}, {"above", side(n.above)}};
  j["below"] = n.below ? side(*n.below) : nlohmann::json(nullptr);
  return j;
}

inline nlohmann::json certificate_json(const WitnessCertificate& c) {
  nlohmann::json subjects = nlohmann::json::array();
  for (const auto& s : c.subjects) subjects.push_back(neighborhood_json(s));
  nlohmann::json j = {{"claim", to_string(c.claim)}, {"subjects", subjects}};
  if (c.pair_exponent) j["pair_exponent"] = *c.pair_exponent;
  return j;
}

inline nlohmann::json search_json(const SearchReport& r) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : r.steps) {
    nlohmann::json j = {{"i", s.exponent}, {"value", to_string(s.value)}, {"status", step_status_name(s.status)}};
    if (s.brother) j["brother"] = to_string(*s.brother);
    steps.push_back(std::move(j));
  }
  nlohmann::json j = {{"schema", kSearchSchema},
                      {"subject", to_string(r.subject)},
                      {"i_max", r.i_max},
                      {"full_budget", r.reaches_full_budget},
                      {"steps", steps}};
  if (r.outcome == SearchReport::Outcome::CousinFound) {
    j["outcome"] = "cousin_found";
    j["witness"] = to_string(*r.witness);
    j["n"] = r.witness_exponent;
    j["direction"] = r.downward_witness ? "down" : "up";
    if (r.certificate) j["certificate"] = certificate_json(*r.certificate);
  } else {
    j["outcome"] = "candidate_up_to";
  }
  return j;
}

}  // namespace pkin

#endif  // PKIN_REPORT_FORMAT_HPP
