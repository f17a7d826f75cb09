#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "pkin/segment_cache.hpp"

namespace pkin {
namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("pkin_cache_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  return dir;
}

TEST(SegmentCodec, RoundTripIsBitExact) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<std::uint64_t> lo_d(2, 5000000), w_d(0, 200000);
    std::uint64_t lo = trial == 0 ? 2 : lo_d(rng);
    std::uint64_t hi = lo + w_d(rng);
    auto seg = classify_range(lo, hi);
    auto bytes = encode_segment(seg);
    auto back = decode_segment(bytes);
    ASSERT_EQ(back, seg);
    ASSERT_EQ(encode_segment(back), bytes);
  }
}

TEST(SegmentCodec, HeaderLayout) {
  auto bytes = encode_segment(classify_range(2, 10));
  ASSERT_GE(bytes.size(), 4u + 2 + 1 + 16);
  EXPECT_EQ(bytes.substr(0, 4), "PKIN");
  EXPECT_EQ(bytes[4], 1);  // version, little-endian
  EXPECT_EQ(bytes[5], 0);
  EXPECT_EQ(bytes[6], 0);  // global ordinals
  EXPECT_EQ(bytes[7], 2);  // lo
  EXPECT_EQ(bytes[15], 10);  // hi
  EXPECT_EQ(bytes[23], 1);  // one run
  EXPECT_EQ(bytes[24], 'B');
  EXPECT_EQ(bytes[25], 4);  // four members
  EXPECT_EQ(std::string(bytes.begin() + 26, bytes.begin() + 30), std::string("\0\1\2\2", 4));
}

TEST(SegmentCodec, CorruptionIsDetected) {
  auto good = encode_segment(classify_range(2, 1000));
  auto flip = good;
  flip[good.size() / 2] ^= 0x10;
  EXPECT_THROW(decode_segment(flip), data_error);
  EXPECT_THROW(decode_segment(good.substr(0, good.size() - 3)), data_error);
  EXPECT_THROW(decode_segment("PKIX" + good.substr(4)), data_error);
  EXPECT_THROW(decode_segment(""), data_error);
}

TEST(SegmentCache, StoreLoadAndHitFlag) {
  auto dir = fresh_dir("hit");
  SegmentCache cache(dir);
  auto first = load_or_classify(&cache, 2, 50000, 10000);
  EXPECT_FALSE(first.cache_hit);
  EXPECT_TRUE(fs::exists(cache.path_for(2, 50000)));
  auto second = load_or_classify(&cache, 2, 50000, 10000);
  EXPECT_TRUE(second.cache_hit);
  EXPECT_EQ(second.segment, first.segment);
  fs::remove_all(dir);
}

TEST(SegmentCache, CorruptFileRaisesDataError) {
  auto dir = fresh_dir("corrupt");
  SegmentCache cache(dir);
  cache.store(classify_range(2, 600));
  {
    std::fstream f(cache.path_for(2, 600), std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(30);
    f.put('\x7f');
  }
  EXPECT_THROW(cache.load(2, 600), data_error);
  fs::remove_all(dir);
}

TEST(SegmentCache, ConcurrentWritersLeaveAValidFile) {
  auto dir = fresh_dir("concurrent");
  SegmentCache cache(dir);
  auto seg = classify_range(2, 100000);
  std::vector<std::thread> writers;
  for (int t = 0; t < 4; ++t) {
    writers.emplace_back([&] {
      for (int k = 0; k < 5; ++k) cache.store(seg);
    });
  }
  for (auto& w : writers) w.join();
  EXPECT_EQ(*cache.load(2, 100000), seg);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace pkin
