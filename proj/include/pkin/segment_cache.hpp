#ifndef PKIN_SEGMENT_CACHE_HPP
#define PKIN_SEGMENT_CACHE_HPP

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>
#include <zlib.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pkin/classifier.hpp"
#include "pkin/errors.hpp"

namespace pkin {

// Segment cache file layout, all integers little-endian:
//
//   "PKIN"            magic
//   u16               format version
//   u8                flags (bit 0: provisional run ordinals)
//   u64 lo, u64 hi    classified range
//   varint            run count
//   per run:          kind byte 'B' | 'O', varint member count,
//                     varint deltas (first member relative to the previous
//                     run's last member, or to lo for the first run)
//   u32               CRC-32 of every preceding byte
//
// Run ordinals are implied by order. Kinship refinements are not stored.
inline constexpr std::string_view kCacheMagic = "PKIN";
inline constexpr std::uint16_t kCacheVersion = 1;

namespace detail {

inline void put_le(std::string& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_varint(std::string& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<char>((v & 0x7f) | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<char>(v));
}

class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

  std::uint64_t le(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t{static_cast<unsigned char>(bytes_[pos_++])} << (8 * i);
    return v;
  }

  std::uint64_t varint() {
    std::uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      need(1);
      auto b = static_cast<unsigned char>(bytes_[pos_++]);
      v |= std::uint64_t{b & 0x7fu} << shift;
      if (!(b & 0x80)) return v;
    }
    throw data_error("segment cache: varint overflow");
  }

  unsigned char byte() {
    need(1);
    return static_cast<unsigned char>(bytes_[pos_++]);
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw data_error("segment cache: truncated record");
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

inline std::uint32_t crc32_of(std::string_view bytes) {
  return static_cast<std::uint32_t>(
      ::crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

}  // namespace detail

inline std::string encode_segment(const ClassifiedSegment& seg) {
  std::string out(kCacheMagic);
  detail::put_le(out, kCacheVersion, 2);
  detail::put_le(out, seg.provisional_indices() ? 1 : 0, 1);
  detail::put_le(out, seg.lo(), 8);
  detail::put_le(out, seg.hi(), 8);
  detail::put_varint(out, seg.runs().size());
  std::uint64_t prev = seg.lo();
  for (const auto& run : seg.runs()) {
    out.push_back(static_cast<char>(run.kind));
    detail::put_varint(out, run.members.size());
    for (auto p : run.members) {
      detail::put_varint(out, p - prev);
      prev = p;
    }
  }
  detail::put_le(out, detail::crc32_of(out), 4);
  return out;
}

inline ClassifiedSegment decode_segment(std::string_view bytes) {
  if (bytes.size() < kCacheMagic.size() + 4 || bytes.substr(0, kCacheMagic.size()) != kCacheMagic) {
    throw data_error("segment cache: bad magic");
  }
  auto body = bytes.substr(0, bytes.size() - 4);
  detail::ByteReader trailer(bytes.substr(bytes.size() - 4));
  if (trailer.le(4) != detail::crc32_of(body)) throw data_error("segment cache: checksum mismatch");

  detail::ByteReader in(body.substr(kCacheMagic.size()));
  auto version = in.le(2);
  if (version != kCacheVersion) throw data_error("segment cache: unsupported version " + std::to_string(version));
  auto flags = in.byte();
  if (flags & ~1u) throw data_error("segment cache: unknown flags");
  std::uint64_t lo = in.le(8);
  std::uint64_t hi = in.le(8);
  if (hi < lo) throw data_error("segment cache: inverted range");

  auto run_count = in.varint();
  if (run_count > in.remaining()) throw data_error("segment cache: run count exceeds payload");
  std::vector<Run> runs;
  runs.reserve(run_count);
  std::size_t next_b = 1, next_o = 1;
  std::uint64_t prev = lo;
  for (std::uint64_t r = 0; r < run_count; ++r) {
    auto kind_byte = in.byte();
    if (kind_byte != 'B' && kind_byte != 'O') throw data_error("segment cache: bad run kind");
    auto kind = static_cast<RunKind>(kind_byte);
    auto count = in.varint();
    if (count == 0 || count > in.remaining()) throw data_error("segment cache: bad member count");
    Run run{kind, kind == RunKind::Brother ? next_b++ : next_o++, {}};
    run.members.reserve(count);
    for (std::uint64_t k = 0; k < count; ++k) {
      std::uint64_t delta = in.varint();
      if (delta > hi - prev) throw data_error("segment cache: member beyond range");
      prev += delta;
      run.members.push_back(prev);
    }
    runs.push_back(std::move(run));
  }
  if (in.remaining() != 0) throw data_error("segment cache: trailing bytes");
  return ClassifiedSegment(lo, hi, std::move(runs), flags & 1u);
}

// Directory of segment files guarded by an advisory lock, so concurrent
// processes never observe a half-written file.
class SegmentCache {
 public:
  explicit SegmentCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  std::filesystem::path path_for(std::uint64_t lo, std::uint64_t hi) const {
    return dir_ / ("segment_" + std::to_string(lo) + "_" + std::to_string(hi) + ".pkin");
  }

  // Throws data_error when a file exists but does not decode.
  std::optional<ClassifiedSegment> load(std::uint64_t lo, std::uint64_t hi) const {
    Lock lock(dir_, LOCK_SH);
    auto path = path_for(lo, hi);
    if (!std::filesystem::exists(path)) return std::nullopt;
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    auto seg = decode_segment(bytes);
    if (seg.lo() != lo || seg.hi() != hi) throw data_error("segment cache: header range does not match file name");
    return seg;
  }

  void store(const ClassifiedSegment& seg) const {
    Lock lock(dir_, LOCK_EX);
    auto path = path_for(seg.lo(), seg.hi());
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      auto bytes = encode_segment(seg);
      out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
      if (!out) throw data_error("segment cache: write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
  }

  const std::filesystem::path& dir() const { return dir_; }

 private:
  class Lock {
   public:
    Lock(const std::filesystem::path& dir, int mode) {
      fd_ = ::open((dir / ".lock").c_str(), O_RDWR | O_CREAT, 0644);
      if (fd_ < 0) throw data_error("segment cache: cannot open lock file in " + dir.string());
      ::flock(fd_, mode);
    }
    ~Lock() {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
    }
    Lock(const Lock&) = delete;
    Lock& operator=(const Lock&) = delete;

   private:
    int fd_ = -1;
  };

  std::filesystem::path dir_;
};

struct CachedClassification {
  ClassifiedSegment segment;
  bool cache_hit = false;
};

// Classification of [lo, hi] through an optional cache: a stored file is
// decoded, otherwise the range is classified in segments and stored.
inline CachedClassification load_or_classify(const SegmentCache* cache, std::uint64_t lo, std::uint64_t hi,
                                             std::uint64_t segment_width, unsigned threads = 1) {
  if (cache) {
    if (auto seg = cache->load(lo, hi)) return {std::move(*seg), true};
  }
  auto seg = classify_segmented(lo, hi, segment_width, threads);
  if (cache) cache->store(seg);
  return {std::move(seg), false};
}

}  // namespace pkin

#endif  // PKIN_SEGMENT_CACHE_HPP
