#pragma once

// Bounded search for the Bowditch Q-conditions.
//
// Starting from a finite subtree, every inward circular edge is either
// certified (all values beyond it are provably larger than 2 in modulus) or
// the subtree is grown across it. The search stops with a certificate, a
// rejection, or when the depth budget runs out.

#include <cstddef>
#include <string>
#include <vector>

#include "mcshane/charvariety.hpp"
#include "mcshane/fareytree.hpp"
#include "mcshane/mcg.hpp"

namespace mcshane {

struct FlowEdge {
  DirectedEdge edge;  // from the larger |phi| to the smaller
  bool tie = false;
};

// Flow on the Farey edge (x, y). Ties point toward the canonically lesser
// apex and are flagged.
FlowEdge flow_direction(const TraceMap& tm, const Slope& x, const Slope& y);

struct SublevelSet {
  std::vector<Slope> slopes;  // canonical order
  bool connected = true;
};

// Slopes with |phi| <= k among the regions within `max_depth` steps of the
// base vertex. Subtrees certified by the escape criterion with both
// endpoints above k are skipped.
SublevelSet sublevel_set(const TraceMap& tm, double k, int max_depth);

// True iff |x|, |y| > 2 and |z'| >= |z| for e = (X, Y; Z -> Z'), with e
// pointing away from the region being certified. A passing edge bounds every
// value beyond it below by min(|x|, |y|). Certificates additionally demand
// |z'| > |z|.
bool escape_criterion(const TraceMap& tm, const DirectedEdge& e);

// Certificate for the fan of neighbours of a small region X beyond e: with
// y_0 = phi(Y), y_1 = phi(Z'), y_(n+1) = x y_n - y_(n-1), all |y_n| > 2.
// `n0` is the index from which the closed-form lower bound takes over.
struct FanWitness {
  bool ok = false;
  int n0 = 0;
};

FanWitness fan_escape(Complex x, Complex y0, Complex y1);

enum class VerdictKind { kAccepted, kRejectedInterval, kRejectedInfinitelyMany, kUndetermined };

std::string to_string(VerdictKind k);

enum class BQVariant { kClosed, kExtended };

struct CircularWitness {
  DirectedEdge edge;    // points into the certificate tree
  std::string method;   // "escape" or "fan"
  int fan_n0 = 0;
};

struct BQVerdict {
  VerdictKind kind = VerdictKind::kUndetermined;
  BQVariant variant = BQVariant::kClosed;

  FiniteSubtree tree;                    // accepted
  std::vector<CircularWitness> circular;  // accepted

  Slope slope;         // rejected interval
  Complex trace{};     // rejected interval

  std::size_t small_count = 0;  // slopes seen with |phi| <= 2
  std::size_t small_bound = 0;  // 3 * max_depth
  int depth_reached = 0;
  std::size_t vertices_visited = 0;
  std::size_t guard_violations = 0;  // vertices with two strict outward flows and min > 2
  std::string note;
};

inline constexpr int kDefaultBQDepth = 64;

BQVerdict check_bq(const Character& c, int max_depth = kDefaultBQDepth,
                   BQVariant variant = BQVariant::kClosed);

// Relative conditions for a theta-fixed character: the closed conditions on
// C / <theta>, checked over one period of the invariant axis and the
// branches hanging off it. Throws InvalidArgument if c is not fixed (1e-8)
// or theta is not Anosov.
BQVerdict check_relative_bq(const Character& c, const MCGElement& theta,
                            int max_depth = kDefaultBQDepth);

// Empirical growth constant: the minimum of log+|phi(s)| / (|p| + q) over the
// slopes of length <= max_size that are not regions of the certificate tree.
double fibonacci_growth_constant(const TraceMap& tm, const FiniteSubtree& tree,
                                 std::int64_t max_size);

}  // namespace mcshane
