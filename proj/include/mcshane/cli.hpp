#pragma once

// Command-line front end.
//
//   mcshane bq-check | sum MODE | orbit | enumerate | gap G|S X Y Z  [flags]
//
// Exit codes: 0 target met (or Accepted), 1 usage or input error, 2 BQ
// rejection, 3 undetermined or not converged.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mcshane/bqcheck.hpp"
#include "mcshane/complexarith.hpp"

namespace mcshane::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRejected = 2;
inline constexpr int kExitUndetermined = 3;

struct RunConfig {
  std::string command;              // bq-check, sum, orbit, enumerate, gap
  std::string sum_mode;             // bowditch, cusped, weierstrass, pants, bundle, bundle-cusped
  std::vector<std::string> args;    // gap: function name and three arguments
  std::optional<Complex> kappa;
  std::optional<std::array<Complex, 3>> triple;
  std::optional<std::string> matrices_file;
  std::string theta;
  std::int64_t max_size = 60;
  int depth = kDefaultBQDepth;
  double tol = 1e-6;
  std::string mode;                 // sum: 2pi, pi, none; bq-check: closed, extended
  std::string cls;                  // weierstrass: 01, 10, 11 (all three if empty)
  bool csv = false;
  int jobs = 1;
  std::string cache_dir;
  bool force = false;
};

// Throws ParseError on malformed command lines. Returns nullopt after
// printing help.
std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out);

int run(const RunConfig& config, std::ostream& out, std::ostream& err);

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mcshane::cli
