#pragma once

// Length series identities over simple closed curves of the one-holed torus:
// the generalized McShane sum, the cusped original, the pair-of-pants sum,
// Weierstrass class sums and the relative sums for Anosov-fixed characters.
// Also the edge weights on the dual tree whose finite sums are exact.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mcshane/bqcheck.hpp"
#include "mcshane/charvariety.hpp"
#include "mcshane/complexarith.hpp"
#include "mcshane/errors.hpp"
#include "mcshane/fareytree.hpp"
#include "mcshane/mcg.hpp"

namespace mcshane {

// A series was requested for a character whose BQ check did not accept it.
class BQFailure : public Error {
 public:
  BQFailure(const std::string& what, VerdictKind kind) : Error(what), kind_(kind) {}
  VerdictKind kind() const { return kind_; }

 private:
  VerdictKind kind_;
};

// acosh_pos(-kappa / 2) as a class mod 2 pi i.
LogClass nu_of(Complex kappa);

// log((e^nu + e^l) / (e^-nu + e^l)) with l = 2 half_length(trace), evaluated
// in a form that does not overflow for large Re l.
Complex mcshane_term(Complex trace, const LogClass& nu);

// 1 / (1 + e^l) with l = 2 half_length(trace).
Complex cusped_term(Complex trace);

struct EdgeWeight {
  DirectedEdge edge;
  Complex value;
};

// Weight of e = (X, Y; Z' -> Z), using z = phi(e.to). z / (xy) when kappa is
// -2 (within 1e-12), the logarithmic form otherwise.
EdgeWeight psi_edge(const TraceMap& tm, const DirectedEdge& e);

// Sum of psi over the circular set of t.
Complex circular_psi_sum(const TraceMap& tm, const FiniteSubtree& t);

enum class SumMode {
  kBowditch,
  kCusped,
  kPants,
  kWeierstrass,
  kBundleFull,
  kBundleHalf,
  kBundleCuspedFull,
  kBundleCuspedHalf,
};

std::string to_string(SumMode m);

struct Partial {
  std::int64_t depth = 0;  // largest combinatorial length included
  Complex value{};
  double residual = 0;
  std::size_t terms_used = 0;
};

struct SumReport {
  SumMode mode = SumMode::kBowditch;
  LogClass target;
  std::vector<Partial> partials;  // one per depth checkpoint
  double residual = 0;
  std::size_t terms_used = 0;
  double max_tail_term = 0;  // largest |term| at the final depth
  int target_sign = 0;       // half sums: which of +-target was matched
  std::string note;

  Complex value() const { return partials.empty() ? Complex{} : partials.back().value; }
};

struct SumOptions {
  std::int64_t max_size = 60;
  int bq_depth = kDefaultBQDepth;
  bool force = false;  // skip the BQ precondition
  int jobs = 1;
};

// Requires kappa = -2 for kCusped. Throws BQFailure if the extended BQ check
// does not accept c and force is off.
SumReport sum_identity(const TraceMap& tm, SumMode mode, const SumOptions& opts = {});
SumReport sum_identity(const Character& c, SumMode mode, const SumOptions& opts = {});

// Parity class of (p, q) mod 2: "01", "10" or "11".
enum class SlopeClass { k01, k10, k11 };

SlopeClass slope_class(const Slope& s);
std::string to_string(SlopeClass c);
SlopeClass parse_slope_class(const std::string& text);

enum class WeierstrassKind { kCone, kBoundary };

// Largest real root of t^3 - 3 t^2 + (2 + kappa) = 0: the trace of the
// symmetric triple (t, t, t) with the given real kappa <= 2.
double symmetric_trace(double kappa);

// Sum over slopes of class cls of atan(c / sinh(|gamma| / 2)) with
// c = sqrt(2 - kappa) / 2, i.e. cos(theta / 4) for a cone angle theta and
// cosh(l / 4) for a boundary of length l. Target pi / 2. c must be a real
// character with every trace outside [-2, 2].
SumReport weierstrass_sum(const TraceMap& tm, SlopeClass cls, const SumOptions& opts = {});
SumReport weierstrass_sum(const Character& c, SlopeClass cls, const SumOptions& opts = {});

// Same on the symmetric triple with kappa = -2 cos(theta / 2) (cone angle
// theta in [0, 2 pi)) or kappa = -2 cosh(l / 2) (boundary length l >= 0).
SumReport weierstrass_sum(double param, WeierstrassKind kind, SlopeClass cls,
                          const SumOptions& opts = {});

// Ratio of the translation of A to that of the commutator rho([X, Y]) on the
// common parabolic fixed point, for a fixed character with kappa = -2.
// Throws DegenerateCharacterError if they are not parallel parabolics.
Complex cusp_modulus(const MatrixRep& m, const Mat2& a);

struct BundleSums {
  SumReport full;
  SumReport half;
  Conjugator conjugator;
};

// Sums over orbit representatives of C / <theta>: all of them (target 0) and
// those on the left side of the axis (target +-l(A), sign chosen by the
// smaller residual). With `cusped`, kappa must be -2, the summand is
// 1 / (1 + e^l) and the half target is the cusp modulus.
BundleSums bundle_sums(const TraceMap& tm, const MCGElement& theta, const SumOptions& opts = {},
                       bool cusped = false);
BundleSums bundle_sums(const Character& c, const MCGElement& theta, const SumOptions& opts = {},
                       bool cusped = false);

}  // namespace mcshane
