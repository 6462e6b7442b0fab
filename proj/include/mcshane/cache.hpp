#pragma once

// On-disk cache of trace-map memo tables.
//
// One file per character, named by the SHA-256 digest of (kappa, base
// triple, numeric mode). Files carry a format version and a digest of their
// entries; anything that does not verify is ignored with a warning.

#include <iosfwd>
#include <memory>
#include <string>

#include "mcshane/charvariety.hpp"

namespace mcshane {

inline constexpr int kCacheVersion = 1;
inline constexpr const char* kNumericMode = "binary64";

std::string sha256_hex(const std::string& data);
std::string cache_key(const Character& c);

class TraceCache {
 public:
  explicit TraceCache(std::string dir) : dir_(std::move(dir)) {}

  std::string path_for(const Character& c) const;

  // A trace map seeded from the cache file if it verifies, else a fresh one.
  // Problems are reported on `warn`.
  std::unique_ptr<TraceMap> load(const Character& c, std::ostream& warn) const;
  // Writes the memo table atomically (temp file and rename).
  void store(const TraceMap& tm, std::ostream& warn) const;

 private:
  std::string dir_;
};

}  // namespace mcshane
