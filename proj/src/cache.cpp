#include "mcshane/cache.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "mcshane/errors.hpp"
#include "mcshane/serialize.hpp"

namespace mcshane {

namespace {

constexpr const char* kFormat = "mcshane-tracemap";
constexpr std::size_t kSpotChecks = 16;

std::string hex_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

std::string hex_complex(Complex z) { return hex_double(z.real()) + "," + hex_double(z.imag()); }

Json header_for(const Character& c) {
  return {{"format", kFormat},
          {"version", kCacheVersion},
          {"mode", kNumericMode},
          {"key", cache_key(c)},
          {"character", character_to_json(c)}};
}

bool close(Complex a, Complex b) {
  return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b));
}

}  // namespace

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string cache_key(const Character& c) {
  return sha256_hex(std::string(kFormat) + "|v" + std::to_string(kCacheVersion) + "|" +
                    kNumericMode + "|kappa=" + hex_complex(c.kappa) + "|x=" + hex_complex(c.x) +
                    "|y=" + hex_complex(c.y) + "|z=" + hex_complex(c.z));
}

std::string TraceCache::path_for(const Character& c) const {
  return (std::filesystem::path(dir_) / (cache_key(c) + ".json")).string();
}

std::unique_ptr<TraceMap> TraceCache::load(const Character& c, std::ostream& warn) const {
  const std::string path = path_for(c);
  if (!std::filesystem::exists(path)) return std::make_unique<TraceMap>(c);
  try {
    std::ifstream in(path);
    const Json doc = Json::parse(in);
    const Json expected = header_for(c);
    for (const auto& [k, v] : expected.items()) {
      if (!doc.contains(k) || doc[k] != v) throw ParseError("header field '" + k + "' differs");
    }
    const Json& entries = doc.at("entries");
    if (!entries.is_array() || doc.at("entries_sha256") != sha256_hex(entries.dump())) {
      throw ParseError("entry digest mismatch");
    }
    std::vector<std::pair<Slope, Complex>> parsed;
    for (const auto& e : entries) {
      if (!e.is_array() || e.size() != 4) throw ParseError("malformed entry");
      const auto p = e[0].get<std::int64_t>(), q = e[1].get<std::int64_t>();
      const Slope s = canonical_slope(p, q);
      if (s.p() != p || s.q() != q) throw ParseError("non-canonical slope in entry");
      const Complex v(e[2].get<double>(), e[3].get<double>());
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw ParseError("non-finite entry");
      }
      parsed.emplace_back(s, v);
    }
    const std::size_t stride = std::max<std::size_t>(1, parsed.size() / kSpotChecks);
    for (std::size_t i = 0; i < parsed.size(); i += stride) {
      const auto& [s, v] = parsed[i];
      if (!close(v, trace_by_descent<Complex>(c.x, c.y, c.z, s))) {
        throw ParseError("entry for " + s.to_string() + " fails recomputation");
      }
    }
    auto tm = std::make_unique<TraceMap>(c);
    for (const auto& [s, v] : parsed) tm->insert(s, v);
    return tm;
  } catch (const std::exception& e) {
    warn << "warning: ignoring cache file " << path << ": " << e.what() << '\n';
    return std::make_unique<TraceMap>(c);
  }
}

void TraceCache::store(const TraceMap& tm, std::ostream& warn) const {
  const Character& c = tm.character();
  const std::string path = path_for(c);
  try {
    std::filesystem::create_directories(dir_);
    Json entries = Json::array();
    for (const auto& [s, v] : tm.memo_snapshot()) {
      entries.push_back(Json::array({s.p(), s.q(), v.real(), v.imag()}));
    }
    Json doc = header_for(c);
    doc["entries_sha256"] = sha256_hex(entries.dump());
    doc["entries"] = std::move(entries);
    const std::string tmp = path + ".tmp";
    {
      std::ofstream out(tmp);
      out << doc.dump() << '\n';
      if (!out) throw Error("write failed");
    }
    std::filesystem::rename(tmp, path);
  } catch (const std::exception& e) {
    warn << "warning: could not write cache file " << path << ": " << e.what() << '\n';
  }
}

}  // namespace mcshane
