#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  std::string cmd = std::string(PKIN_CLI_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(PKIN_FIXTURE_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("pkin_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  return dir;
}

TEST(Cli, ClassifyReproducesListing) {
  auto r = run("classify 2 300");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, read_fixture("classify_2_300.txt"));
}

TEST(Cli, ProvisionalOrdinalsAwayFromTwo) {
  auto r = run("classify 40 70");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("B_(1) = {41; 43; 47}"), std::string::npos) << r.out;
}

TEST(Cli, MachineOutput) {
  auto r = run("--format machine classify 2 100");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["schema"], "pkin.classify/1");
  EXPECT_EQ(j["cache"], "off");
}

TEST(Cli, SearchExitCodes) {
  auto found = run("search 53 --imax 35");
  EXPECT_EQ(found.code, 0);
  EXPECT_EQ(found.out, read_fixture("search_53_35.txt"));
  EXPECT_EQ(run("search 211 --imax 211").code, 1);
  EXPECT_EQ(run("search 59").code, 2);   // in B
  EXPECT_EQ(run("search 57").code, 2);   // composite
  EXPECT_EQ(run("search 53 --imax 0").code, 2);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("classify 300 2").code, 2);
  EXPECT_EQ(run("classify 0 10").code, 2);
  EXPECT_EQ(run("--format xml classify 2 10").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
}

TEST(Cli, CacheRoundTripAndCorruption) {
  auto dir = scratch("cache");
  auto first = run("--format machine --cache-dir " + dir.string() + " classify 2 5000");
  ASSERT_EQ(first.code, 0);
  EXPECT_EQ(nlohmann::json::parse(first.out)["cache"], "miss");
  auto second = run("--format machine --cache-dir " + dir.string() + " classify 2 5000");
  ASSERT_EQ(second.code, 0);
  auto j1 = nlohmann::json::parse(first.out), j2 = nlohmann::json::parse(second.out);
  EXPECT_EQ(j2["cache"], "hit");
  j1.erase("cache");
  j2.erase("cache");
  EXPECT_EQ(j1, j2);

  auto file = dir / "segment_2_5000.pkin";
  ASSERT_TRUE(fs::exists(file));
  {
    std::fstream f(file, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(40);
    f.put('\x55');
  }
  EXPECT_EQ(run("--cache-dir " + dir.string() + " classify 2 5000").code, 3);
  fs::remove_all(dir);
}

TEST(Cli, ConfigFileAndOverride) {
  auto dir = scratch("config");
  fs::create_directories(dir);
  auto conf = dir / "run.conf";
  std::ofstream(conf) << "format = machine\nimax = 35\n";
  auto r = run("--config " + conf.string() + " search 53");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["witness"], "34359738421");
  auto table = run("--config " + conf.string() + " --format table search 53 --imax 34");
  EXPECT_EQ(table.code, 1);
  EXPECT_NE(table.out.find("outcome=candidate_up_to i_max=34"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, CensusAndWieferich) {
  auto c = run("--format machine census 2 300");
  ASSERT_EQ(c.code, 0);
  EXPECT_EQ(nlohmann::json::parse(c.out)["pi_O"], 8);
  auto w = run("wieferich 10000");
  EXPECT_EQ(w.code, 0);
  EXPECT_NE(w.out.find("p=1093 wieferich=yes kinship=in_B brother=1091"), std::string::npos) << w.out;
  EXPECT_NE(w.out.find("p=3511 wieferich=yes kinship=in_O outcome=cousin_found witness=17592186047927 n=44"),
            std::string::npos)
      << w.out;
}

TEST(Cli, VerifyPaperSkippingBigClaims) {
  auto r = run("verify-paper --skip big");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("SKIP cousin_211_448"), std::string::npos);
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}

}  // namespace
