// pkin: classify primes by power-of-two kinship, scan for cousins, run
// census statistics and reproduce the published reference tables.
//
// Exit codes:
//   0  success (search: cousin found; verify-paper: all claims pass)
//   1  negative result (search: candidate up to budget; verify-paper: a claim failed)
//   2  usage or domain error
//   3  data error (corrupt segment cache)
//   4  resource error

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "pkin/embedded_fixtures.hpp"
#include "pkin/pkin.hpp"

namespace {

using namespace pkin;

enum Exit : int { kOk = 0, kNegative = 1, kUsage = 2, kData = 3, kResource = 4 };

struct GlobalFlags {
  std::string config_path;
  std::optional<std::string> cache_dir;
  std::optional<std::string> format;
  std::optional<unsigned> rounds;
  std::optional<std::uint64_t> segment_size;
  std::optional<unsigned> threads;
  std::optional<unsigned> imax;
};

RunConfig resolve_config(const GlobalFlags& f) {
  RunConfig cfg;
  if (!f.config_path.empty()) cfg = load_config(f.config_path, cfg);
  if (f.cache_dir) cfg.cache_dir = *f.cache_dir;
  if (f.format) cfg.format = parse_format(*f.format);
  if (f.rounds) cfg.rounds = *f.rounds;
  if (f.segment_size) cfg.segment_size = *f.segment_size;
  if (f.threads) cfg.threads = *f.threads;
  if (f.imax) cfg.imax = *f.imax;
  cfg.validate();
  return cfg;
}

std::unique_ptr<SegmentCache> open_cache(const RunConfig& cfg) {
  if (!cfg.cache_dir) return nullptr;
  return std::make_unique<SegmentCache>(*cfg.cache_dir);
}

ScanOptions scan_options(const RunConfig& cfg) {
  ScanOptions s;
  s.threads = cfg.threads;
  s.primality.rounds = cfg.rounds;
  return s;
}

void check_range(std::uint64_t lo, std::uint64_t hi) {
  if (lo < 2 || hi < lo) throw CLI::ValidationError("range", "expected 2 <= lo <= hi");
}

CachedClassification classify_with_cache(const RunConfig& cfg, std::uint64_t lo, std::uint64_t hi) {
  auto cache = open_cache(cfg);
  auto result = load_or_classify(cache.get(), lo, hi, cfg.segment_size, cfg.threads);
  if (cache) {
    std::cerr << (result.cache_hit ? "cache hit: " : "cache store: ") << cache->path_for(lo, hi).string() << "\n";
  }
  return result;
}

int cmd_classify(const RunConfig& cfg, std::uint64_t lo, std::uint64_t hi, bool chains) {
  check_range(lo, hi);
  auto [raw, hit] = classify_with_cache(cfg, lo, hi);
  auto seg = resolve_cousins(raw);
  if (cfg.format == OutputFormat::Machine) {
    auto j = segment_json(seg);
    j["cache"] = hit ? "hit" : (cfg.cache_dir ? "miss" : "off");
    std::cout << j.dump() << "\n";
  } else {
    std::cout << format_runs(seg);
    if (chains) std::cout << format_chains(cousin_run_report(seg));
  }
  return kOk;
}

int cmd_search(const RunConfig& cfg, const std::string& subject, bool full_scan) {
  Nat p = nat_from_string(subject);
  if (!fits_u64(p)) throw domain_error("search: subject must be below 2^64 so that it can be classified");
  if (!is_prime(p)) throw domain_error("search: " + subject + " is not prime");
  auto seg = classify_with_cache(cfg, 2, to_u64(p)).segment;
  if (seg.in_brothers(to_u64(p))) {
    throw domain_error("search: " + subject +
                       " is a brother/sister prime; primes in B have no cousins and cousins have no brothers");
  }
  auto budget = cfg.imax ? ScanBudget{*cfg.imax, p <= *cfg.imax} : default_budget(p);
  auto opts = scan_options(cfg);
  opts.full_scan = full_scan;
  auto report = candidate_scan(p, budget.i_max, seg, opts);
  if (cfg.format == OutputFormat::Machine) {
    std::cout << search_json(report).dump() << "\n";
  } else {
    std::cout << format_transcript(report);
  }
  return report.outcome == SearchReport::Outcome::CousinFound ? kOk : kNegative;
}

int cmd_census(const RunConfig& cfg, std::uint64_t lo, std::uint64_t hi, bool scan_candidates) {
  check_range(lo, hi);
  auto seg = resolve_cousins(classify_with_cache(cfg, lo, hi).segment);
  if (scan_candidates) {
    if (lo > 2) throw domain_error("census: --scan-candidates needs a range starting at 2");
    auto opts = scan_options(cfg);
    seg = cfg.imax ? refine_with_scans(seg, [&](const Nat&) { return *cfg.imax; }, opts)
                   : refine_with_scans(seg, opts);
  }
  auto report = run_census(seg);
  if (cfg.format == OutputFormat::Machine) {
    auto j = census_json(report);
    if (seg.primes().size() >= 100) {
      auto t = twin_density_check(seg);
      j["twin_density"] = {{"twin_pairs", t.twin_pairs}, {"twin_constant", t.twin_constant},
                           {"estimate", t.estimate}, {"ratio", t.ratio}};
    }
    std::cout << j.dump() << "\n";
  } else {
    std::cout << census_text(report);
    if (seg.primes().size() >= 100) {
      auto t = twin_density_check(seg);
      std::cout << "twin_constant: " << t.twin_constant << "\n"
                << "twin_estimate: " << t.estimate << "\n"
                << "twin_ratio: " << t.ratio << "\n";
    }
  }
  return kOk;
}

int cmd_wieferich(const RunConfig& cfg, std::uint64_t hi) {
  WieferichOptions opts;
  opts.threads = cfg.threads;
  opts.scan = scan_options(cfg);
  if (cfg.imax) opts.cousin_budget = *cfg.imax;
  auto records = wieferich_scan(hi, opts);
  if (cfg.format == OutputFormat::Machine) {
    auto arr = nlohmann::json::array();
    for (const auto& r : records) {
      nlohmann::json j = {{"p", to_string(r.p)},
                          {"wieferich", r.satisfies},
                          {"kinship", r.kinship.in_b ? "in_B" : "in_O"},
                          {"certificate", certificate_json(r.kinship.certificate)}};
      if (r.kinship.in_b) j["brother"] = to_string(*r.kinship.brother);
      if (r.cousin_scan) j["cousin_scan"] = search_json(*r.cousin_scan);
      arr.push_back(std::move(j));
    }
    std::cout << nlohmann::json{{"schema", "pkin.wieferich/1"}, {"bound", hi}, {"records", arr}}.dump() << "\n";
  } else {
    for (const auto& r : records) {
      std::cout << "p=" << to_string(r.p) << " wieferich=yes";
      if (r.kinship.in_b) {
        std::cout << " kinship=in_B brother=" << to_string(*r.kinship.brother) << " n=" << r.kinship.exponent;
      } else {
        std::cout << " kinship=in_O";
        if (r.cousin_scan) std::cout << " " << format_outcome(*r.cousin_scan);
      }
      std::cout << "\n";
    }
  }
  return kOk;
}

int cmd_verify(const RunConfig& cfg, const std::vector<std::string>& skip) {
  auto cache = open_cache(cfg);
  ClaimOptions opts;
  opts.skip = {skip.begin(), skip.end()};
  opts.cache = cache.get();
  opts.segment_width = cfg.segment_size;
  opts.scan = scan_options(cfg);
  bool all = true;
  for (const auto& r : run_reference_claims(embedded_fixtures(), opts)) {
    const char* tag = r.skipped ? "SKIP" : (r.passed ? "PASS" : "FAIL");
    std::cout << tag << " " << r.id << ": " << r.description << "\n";
    if (!r.passed) {
      all = false;
      std::cout << r.detail;
      if (!r.detail.empty() && r.detail.back() != '\n') std::cout << "\n";
    }
  }
  return all ? kOk : kNegative;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pkin: power-of-two kinship of primes"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags flags;
  app.add_option("--config", flags.config_path, "key=value config file; flags override it");
  app.add_option("--cache-dir", flags.cache_dir, "segment cache directory");
  app.add_option("--format", flags.format, "output format: table or machine");
  app.add_option("--budget-rounds", flags.rounds, "random-base rounds for probable primes");
  app.add_option("--segment-size", flags.segment_size, "numbers per classification segment");
  app.add_option("--threads", flags.threads, "worker threads");

  std::uint64_t lo = 0, hi = 0;
  bool chains = false;
  auto* classify = app.add_subcommand("classify", "label primes in [lo, hi] as B or O runs");
  classify->add_option("lo", lo)->required();
  classify->add_option("hi", hi)->required();
  classify->add_flag("--chains", chains, "also print cousin chains");

  std::string subject;
  bool full_scan = false;
  auto* search = app.add_subcommand("search", "isolated-candidate scan of p + 2^i");
  search->add_option("p", subject)->required();
  search->add_option("--imax", flags.imax, "largest exponent i to scan");
  search->add_flag("--full-scan", full_scan, "continue past the first O-witness");

  bool scan_candidates = false;
  auto* census = app.add_subcommand("census", "set sizes, residue races and gap histograms");
  census->add_option("lo", lo)->required();
  census->add_option("hi", hi)->required();
  census->add_flag("--scan-candidates", scan_candidates, "run candidate scans on unresolved O-members");
  census->add_option("--imax", flags.imax, "scan budget for --scan-candidates");

  std::uint64_t wieferich_hi = 0;
  auto* wieferich = app.add_subcommand("wieferich", "Wieferich primes up to hi and their kinship");
  wieferich->add_option("hi", wieferich_hi)->required();
  wieferich->add_option("--imax", flags.imax, "cousin scan budget for hits in O");

  std::vector<std::string> skip;
  auto* verify = app.add_subcommand("verify-paper", "check every published reference value");
  verify->add_option("--skip", skip, "skip claims with this tag (big)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    RunConfig cfg = resolve_config(flags);
    if (*classify) return cmd_classify(cfg, lo, hi, chains);
    if (*search) return cmd_search(cfg, subject, full_scan);
    if (*census) return cmd_census(cfg, lo, hi, scan_candidates);
    if (*wieferich) return cmd_wieferich(cfg, wieferich_hi);
    if (*verify) return cmd_verify(cfg, skip);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const data_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const resource_error& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return kResource;
  } catch (const domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return kResource;
  }
  return kUsage;
}
