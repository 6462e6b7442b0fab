#pragma once

// Combinatorics of the Farey triangulation (the pants graph of the one-holed
// torus) and of its dual trivalent tree.
//
// Regions of the tree are slopes p/q; vertices are Farey triangles
// (generating triples); edges are Farey edges (generating pairs).

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace mcshane {

// A reduced slope p/q with q > 0, or (1, 0) for infinity.
//
// Slopes are stored in 64-bit integers with checked arithmetic; every
// operation that would leave the range throws OverflowError.
class Slope {
 public:
  Slope() : p_(0), q_(1) {}

  std::int64_t p() const { return p_; }
  std::int64_t q() const { return q_; }
  bool is_infinity() const { return q_ == 0; }

  std::string to_string() const;
  static Slope parse(const std::string& text);
  static Slope infinity() { return Slope(1, 0); }

  friend bool operator==(const Slope&, const Slope&) = default;
  // Lexicographic on (p, q); only used for containers. See compare_on_line
  // for the geometric order.
  friend auto operator<=>(const Slope&, const Slope&) = default;

 private:
  Slope(std::int64_t p, std::int64_t q) : p_(p), q_(q) {}
  friend Slope canonical_slope(std::int64_t p, std::int64_t q);

  std::int64_t p_;
  std::int64_t q_;
};

// Reduced, sign-normalized representative. Throws InvalidArgument on (0, 0).
Slope canonical_slope(std::int64_t p, std::int64_t q);

// |p| + q, with infinity of length 1. Equals the cyclically reduced word
// length of the corresponding free-group element.
std::int64_t combinatorial_length(const Slope& s);

// p1 q2 - p2 q1; Farey neighbours have |det| = 1.
std::int64_t farey_det(const Slope& a, const Slope& b);
bool are_farey_neighbors(const Slope& a, const Slope& b);

// The two slopes forming a triangle with the neighbours a, b.
std::pair<Slope, Slope> apexes(const Slope& a, const Slope& b);
// The apex of (a, b) different from `apex`. Throws if `apex` is not one.
Slope other_apex(const Slope& a, const Slope& b, const Slope& apex);

// Linear order on Q u {inf} with infinity largest; returns <0, 0, >0.
int compare_on_line(const Slope& a, const Slope& b);
// True iff s lies strictly inside the arc of the circle Q u {inf} that runs
// upward from a to b (passing through infinity when a > b).
bool in_open_arc(const Slope& a, const Slope& b, const Slope& s);

struct FareyTriple {
  Slope a, b, c;

  // Sorted copy; two triples describe the same tree vertex iff their
  // canonical forms are equal.
  FareyTriple canonical() const;
  bool contains(const Slope& s) const { return a == s || b == s || c == s; }
  bool is_valid() const;

  friend bool operator==(const FareyTriple&, const FareyTriple&) = default;
  friend auto operator<=>(const FareyTriple&, const FareyTriple&) = default;
};

FareyTriple base_triple();  // (0/1, inf, 1/1)

// Directed edge (x, y; from -> to) of the dual tree: it leaves the vertex
// (x, y, from) and enters the vertex (x, y, to).
struct DirectedEdge {
  Slope x, y, from, to;

  DirectedEdge reversed() const { return {x, y, to, from}; }
  FareyTriple tail_vertex() const { return {x, y, from}; }
  FareyTriple head_vertex() const { return {x, y, to}; }
  bool is_valid() const;

  // Same undirected edge and same direction, ignoring the order of x and y.
  bool same_as(const DirectedEdge& other) const;
  std::string to_string() const;

  friend bool operator==(const DirectedEdge&, const DirectedEdge&) = default;
};

// Builds the directed edge leaving (x, y, from). Validates neighbourhood.
DirectedEdge make_edge(const Slope& x, const Slope& y, const Slope& from);

// The n-th neighbour of region x counted from y: canonical(y + n x).
Slope neighbor_sequence(const Slope& x, const Slope& y, std::int64_t n);

// The two edges leaving e's head vertex, both pointing away from e's tail.
std::pair<DirectedEdge, DirectedEdge> expand_edge(const DirectedEdge& e);

// The three edges pointing into the vertex t.
std::vector<DirectedEdge> edges_into(const FareyTriple& t);

// Tail(e): slopes in the closed Farey interval between x and y that contains
// the `from` region.
bool tail_contains(const DirectedEdge& e, const Slope& s);

// A finite connected set of tree vertices.
class FiniteSubtree {
 public:
  FiniteSubtree() = default;
  explicit FiniteSubtree(std::vector<FareyTriple> vertices);

  static FiniteSubtree single(const FareyTriple& t);

  const std::vector<FareyTriple>& vertices() const { return vertices_; }
  bool empty() const { return vertices_.empty(); }
  std::size_t size() const { return vertices_.size(); }
  bool contains(const FareyTriple& t) const;

  // Adds the head vertex of an edge leaving the subtree.
  void grow(const DirectedEdge& outward);
  bool is_connected() const;

 private:
  std::vector<FareyTriple> vertices_;  // canonical forms
};

// Directed edges adjacent to t and pointing into it, ordered by vertex
// insertion order. Throws InvalidArgument on an empty or disconnected tree.
std::vector<DirectedEdge> circular_set(const FiniteSubtree& t);

// All slopes with combinatorial length <= max_size, size-major and in
// increasing order on the line within each size (infinity last).
std::vector<Slope> enumerate_slopes(std::int64_t max_size);

// Canonical summation order used everywhere: size-major, then line order.
bool canonical_order_less(const Slope& a, const Slope& b);

// Visits every slope of the subtree hanging beyond `e` (the slopes of
// Tail(-e) other than e.x and e.y) with combinatorial length <= max_size.
// The visitor receives the new region and the edge through which it was
// reached (the region is that edge's `to`).
void visit_beyond(const DirectedEdge& e, std::int64_t max_size,
                  const std::function<void(const DirectedEdge&)>& visit);

struct SlopeHash {
  std::size_t operator()(const Slope& s) const noexcept {
    return std::hash<std::int64_t>()(s.p()) * 1000003u ^ std::hash<std::int64_t>()(s.q());
  }
};

}  // namespace mcshane
