#include "mcshane/fareytree.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "mcshane/errors.hpp"

namespace mcshane {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("slope arithmetic overflow");
  return r;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_sub_overflow(a, b, &r)) throw OverflowError("slope arithmetic overflow");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("slope arithmetic overflow");
  return r;
}

Slope vec_sum(const Slope& a, const Slope& b, int sign) {
  const std::int64_t p = sign > 0 ? checked_add(a.p(), b.p()) : checked_sub(a.p(), b.p());
  const std::int64_t q = sign > 0 ? checked_add(a.q(), b.q()) : checked_sub(a.q(), b.q());
  return canonical_slope(p, q);
}

}  // namespace

Slope canonical_slope(std::int64_t p, std::int64_t q) {
  if (p == 0 && q == 0) throw InvalidArgument("slope (0, 0) is not a curve");
  if (p == INT64_MIN || q == INT64_MIN) throw OverflowError("slope component out of range");
  if (q == 0) return Slope(1, 0);
  if (p == 0) return Slope(0, 1);
  const std::int64_t g = std::gcd(std::llabs(p), std::llabs(q));
  p /= g;
  q /= g;
  if (q < 0) {
    p = -p;
    q = -q;
  }
  return Slope(p, q);
}

std::string Slope::to_string() const {
  if (is_infinity()) return "inf";
  return std::to_string(p_) + "/" + std::to_string(q_);
}

Slope Slope::parse(const std::string& text) {
  if (text == "inf" || text == "1/0" || text == "-1/0") return infinity();
  const auto slash = text.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const long long p = std::stoll(text, &used);
      if (used != text.size()) throw ParseError("bad slope '" + text + "'");
      return canonical_slope(p, 1);
    }
    const std::string ps = text.substr(0, slash);
    const std::string qs = text.substr(slash + 1);
    const long long p = std::stoll(ps, &used);
    if (used != ps.size()) throw ParseError("bad slope '" + text + "'");
    const long long q = std::stoll(qs, &used);
    if (used != qs.size()) throw ParseError("bad slope '" + text + "'");
    return canonical_slope(p, q);
  } catch (const std::logic_error&) {
    throw ParseError("bad slope '" + text + "'");
  }
}

std::int64_t combinatorial_length(const Slope& s) {
  if (s.is_infinity()) return 1;
  return checked_add(std::llabs(s.p()), s.q());
}

std::int64_t farey_det(const Slope& a, const Slope& b) {
  return checked_sub(checked_mul(a.p(), b.q()), checked_mul(b.p(), a.q()));
}

bool are_farey_neighbors(const Slope& a, const Slope& b) {
  return std::llabs(farey_det(a, b)) == 1;
}

std::pair<Slope, Slope> apexes(const Slope& a, const Slope& b) {
  if (!are_farey_neighbors(a, b)) {
    throw InvalidArgument(a.to_string() + " and " + b.to_string() + " are not Farey neighbours");
  }
  return {vec_sum(a, b, +1), vec_sum(a, b, -1)};
}

Slope other_apex(const Slope& a, const Slope& b, const Slope& apex) {
  const auto [s, d] = apexes(a, b);
  if (s == apex) return d;
  if (d == apex) return s;
  throw InvalidArgument(apex.to_string() + " is not an apex of (" + a.to_string() + ", " +
                        b.to_string() + ")");
}

int compare_on_line(const Slope& a, const Slope& b) {
  if (a.is_infinity() || b.is_infinity()) {
    return static_cast<int>(a.is_infinity()) - static_cast<int>(b.is_infinity());
  }
  const __int128 lhs = static_cast<__int128>(a.p()) * b.q();
  const __int128 rhs = static_cast<__int128>(b.p()) * a.q();
  return (lhs > rhs) - (lhs < rhs);
}

bool in_open_arc(const Slope& a, const Slope& b, const Slope& s) {
  const int ab = compare_on_line(a, b);
  if (ab == 0) return s != a;
  if (ab < 0) return compare_on_line(a, s) < 0 && compare_on_line(s, b) < 0;
  return compare_on_line(s, a) > 0 || compare_on_line(s, b) < 0;
}

FareyTriple FareyTriple::canonical() const {
  std::array<Slope, 3> v{a, b, c};
  std::sort(v.begin(), v.end());
  return {v[0], v[1], v[2]};
}

bool FareyTriple::is_valid() const {
  return are_farey_neighbors(a, b) && are_farey_neighbors(b, c) && are_farey_neighbors(a, c);
}

FareyTriple base_triple() {
  return {canonical_slope(0, 1), Slope::infinity(), canonical_slope(1, 1)};
}

bool DirectedEdge::is_valid() const {
  if (!are_farey_neighbors(x, y) || from == to) return false;
  const auto [s, d] = apexes(x, y);
  return (from == s && to == d) || (from == d && to == s);
}

bool DirectedEdge::same_as(const DirectedEdge& o) const {
  return from == o.from && to == o.to && ((x == o.x && y == o.y) || (x == o.y && y == o.x));
}

std::string DirectedEdge::to_string() const {
  return "(" + x.to_string() + ", " + y.to_string() + "; " + from.to_string() + " -> " +
         to.to_string() + ")";
}

DirectedEdge make_edge(const Slope& x, const Slope& y, const Slope& from) {
  return {x, y, from, other_apex(x, y, from)};
}

Slope neighbor_sequence(const Slope& x, const Slope& y, std::int64_t n) {
  if (!are_farey_neighbors(x, y)) {
    throw InvalidArgument("neighbor_sequence: " + x.to_string() + ", " + y.to_string() +
                          " are not Farey neighbours");
  }
  return canonical_slope(checked_add(y.p(), checked_mul(n, x.p())),
                         checked_add(y.q(), checked_mul(n, x.q())));
}

std::pair<DirectedEdge, DirectedEdge> expand_edge(const DirectedEdge& e) {
  // Head vertex is (x, y, to). Leaving it across (x, to) and (y, to).
  return {make_edge(e.x, e.to, e.y), make_edge(e.y, e.to, e.x)};
}

std::vector<DirectedEdge> edges_into(const FareyTriple& t) {
  return {make_edge(t.b, t.c, t.a).reversed(), make_edge(t.a, t.c, t.b).reversed(),
          make_edge(t.a, t.b, t.c).reversed()};
}

bool tail_contains(const DirectedEdge& e, const Slope& s) {
  if (s == e.x || s == e.y) return true;
  if (in_open_arc(e.x, e.y, e.from)) return in_open_arc(e.x, e.y, s);
  return in_open_arc(e.y, e.x, s);
}

FiniteSubtree::FiniteSubtree(std::vector<FareyTriple> vertices) {
  for (const auto& v : vertices) {
    if (!v.is_valid()) throw InvalidArgument("subtree vertex is not a Farey triangle");
    const auto c = v.canonical();
    if (!contains(c)) vertices_.push_back(c);
  }
}

FiniteSubtree FiniteSubtree::single(const FareyTriple& t) { return FiniteSubtree({t}); }

bool FiniteSubtree::contains(const FareyTriple& t) const {
  const auto c = t.canonical();
  return std::find(vertices_.begin(), vertices_.end(), c) != vertices_.end();
}

void FiniteSubtree::grow(const DirectedEdge& outward) {
  if (!contains(outward.tail_vertex())) {
    throw InvalidArgument("grow: edge " + outward.to_string() + " does not leave the subtree");
  }
  const auto head = outward.head_vertex().canonical();
  if (!contains(head)) vertices_.push_back(head);
}

bool FiniteSubtree::is_connected() const {
  if (vertices_.empty()) return false;
  std::set<FareyTriple> members(vertices_.begin(), vertices_.end());
  std::set<FareyTriple> seen{vertices_.front()};
  std::queue<FareyTriple> todo;
  todo.push(vertices_.front());
  while (!todo.empty()) {
    const auto v = todo.front();
    todo.pop();
    for (const auto& in : edges_into(v)) {
      const auto n = in.tail_vertex().canonical();
      if (members.count(n) && seen.insert(n).second) todo.push(n);
    }
  }
  return seen.size() == members.size();
}

std::vector<DirectedEdge> circular_set(const FiniteSubtree& t) {
  if (t.empty()) throw InvalidArgument("circular_set: empty subtree");
  if (!t.is_connected()) throw InvalidArgument("circular_set: subtree is not connected");
  std::vector<DirectedEdge> out;
  for (const auto& v : t.vertices()) {
    for (const auto& in : edges_into(v)) {
      if (!t.contains(in.tail_vertex())) out.push_back(in);
    }
  }
  return out;
}

bool canonical_order_less(const Slope& a, const Slope& b) {
  const auto la = combinatorial_length(a);
  const auto lb = combinatorial_length(b);
  if (la != lb) return la < lb;
  return compare_on_line(a, b) < 0;
}

void visit_beyond(const DirectedEdge& e, std::int64_t max_size,
                  const std::function<void(const DirectedEdge&)>& visit) {
  std::vector<DirectedEdge> stack{e};
  while (!stack.empty()) {
    const DirectedEdge cur = stack.back();
    stack.pop_back();
    const auto size = combinatorial_length(cur.to);
    const bool outward =
        size > std::max(combinatorial_length(cur.x), combinatorial_length(cur.y));
    // Sizes only grow once a path moves away from the base vertex.
    if (outward && size > max_size) continue;
    if (size <= max_size) visit(cur);
    const auto [a, b] = expand_edge(cur);
    stack.push_back(b);
    stack.push_back(a);
  }
}

std::vector<Slope> enumerate_slopes(std::int64_t max_size) {
  if (max_size < 1) throw InvalidArgument("enumerate_slopes: max_size must be >= 1");
  std::vector<Slope> out{canonical_slope(0, 1), Slope::infinity()};
  const auto base = base_triple();
  // The two vertices on either side of the central edge (0/1, inf).
  for (const auto& root : {make_edge(base.a, base.b, canonical_slope(-1, 1)),
                           make_edge(base.a, base.b, base.c)}) {
    visit_beyond(root, max_size, [&](const DirectedEdge& e) { out.push_back(e.to); });
  }
  std::sort(out.begin(), out.end(), canonical_order_less);
  return out;
}

}  // namespace mcshane
