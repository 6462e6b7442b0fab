#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "mcshane/bqcheck.hpp"
#include "mcshane/errors.hpp"

using namespace mcshane;

namespace {

Slope S(std::int64_t p, std::int64_t q) { return canonical_slope(p, q); }

Character random_character(std::mt19937_64& rng, double spread) {
  std::normal_distribution<double> n(0, spread);
  return Character::from_triple(Complex(n(rng), n(rng)), Complex(n(rng), n(rng)),
                                Complex(n(rng), n(rng)));
}

Character figure_eight() {
  for (const auto& c : fixed_characters_of(MCGElement::from_word("RL"), -2.0)) {
    if (c.x.imag() > 0.5) return c;
  }
  throw std::runtime_error("figure-eight character not found");
}

std::vector<DirectedEdge> base_outward() {
  std::vector<DirectedEdge> out;
  for (const auto& e : edges_into(base_triple())) out.push_back(e.reversed());
  return out;
}

// All regions beyond e within `depth` further vertices.
void collect_tail(const DirectedEdge& e, int depth, std::vector<Slope>& out) {
  out.push_back(e.to);
  if (depth == 0) return;
  const auto [a, b] = expand_edge(e);
  collect_tail(a, depth - 1, out);
  collect_tail(b, depth - 1, out);
}

}  // namespace

TEST_CASE("flow directions") {
  TraceMap tm(Character::from_triple(3, 3, 3));
  const FlowEdge f = flow_direction(tm, S(0, 1), Slope::infinity());
  CHECK_FALSE(f.tie);
  CHECK(f.edge.from == S(-1, 1));
  CHECK(f.edge.to == S(1, 1));
  CHECK(tm.trace_of(f.edge.to) == Complex(3));

  TraceMap t2(Character::from_triple(4, 4, 8));
  CHECK(t2.character().kappa == Complex(-34));
  const FlowEdge tie = flow_direction(t2, S(0, 1), Slope::infinity());
  CHECK(tie.tie);
  CHECK(tie.edge.to == S(-1, 1));
  TraceMap t3(Character::from_triple(2, 2, 2));
  CHECK(flow_direction(t3, S(0, 1), S(1, 1)).tie);

  // Equivariance under the mapping class group.
  std::mt19937_64 rng(41);
  for (int i = 0; i < 20; ++i) {
    const Character c = random_character(rng, 2);
    const MCGElement theta = MCGElement::from_word(i % 2 ? "RLr" : "LLR");
    TraceMap a(c), b(mcg_act_on_character(theta, c));
    for (const auto& s : enumerate_slopes(6)) {
      for (const auto& t : enumerate_slopes(6)) {
        if (!are_farey_neighbors(s, t) || !canonical_order_less(s, t)) continue;
        const FlowEdge fa = flow_direction(a, s, t);
        if (fa.tie) continue;
        const FlowEdge fb =
            flow_direction(b, mcg_act_on_slope(theta, s), mcg_act_on_slope(theta, t));
        CHECK(fb.edge.to == mcg_act_on_slope(theta, fa.edge.to));
      }
    }
  }
}

TEST_CASE("sublevel sets") {
  TraceMap markoff(Character::from_triple(3, 3, 3));
  CHECK(sublevel_set(markoff, 2, 10).slopes.empty());

  TraceMap flat(Character::from_triple(2, 2, 2));
  const SublevelSet all = sublevel_set(flat, 2, 8);
  std::vector<Slope> expect{S(0, 1), Slope::infinity(), S(1, 1)};
  for (const auto& e : base_outward()) collect_tail(e, 7, expect);
  CHECK(all.slopes.size() == expect.size());
  CHECK(std::set<Slope>(all.slopes.begin(), all.slopes.end()) ==
        std::set<Slope>(expect.begin(), expect.end()));
  CHECK(all.connected);

  std::mt19937_64 rng(42);
  int nonempty = 0;
  for (int i = 0; i < 40; ++i) {
    TraceMap tm(random_character(rng, 1.5));
    for (double k : {2.0, 3.0, 5.0}) {
      const SublevelSet s = sublevel_set(tm, k, 10);
      if (s.slopes.empty()) continue;
      ++nonempty;
      CHECK(s.connected);
    }
  }
  CHECK(nonempty > 10);
  CHECK_THROWS_AS(sublevel_set(markoff, 1.5, 3), InvalidArgument);
}

TEST_CASE("escape criterion") {
  TraceMap markoff(Character::from_triple(3, 3, 3));
  for (const auto& e : base_outward()) CHECK(escape_criterion(markoff, e));
  TraceMap flat(Character::from_triple(2, 2, 2));
  std::vector<DirectedEdge> edges = base_outward();
  for (int d = 0; d < 3; ++d) {
    std::vector<DirectedEdge> next;
    for (const auto& e : edges) {
      CHECK_FALSE(escape_criterion(flat, e));
      const auto [a, b] = expand_edge(e);
      next.push_back(a);
      next.push_back(b);
    }
    edges = next;
  }

  // Brute-force tail scan: a passing edge bounds its tail below.
  std::mt19937_64 rng(43);
  int passing = 0;
  for (int i = 0; i < 60; ++i) {
    TraceMap tm(random_character(rng, 2.5));
    std::vector<DirectedEdge> level = base_outward();
    for (int d = 0; d < 4; ++d) {
      std::vector<DirectedEdge> next;
      for (const auto& e : level) {
        if (escape_criterion(tm, e)) {
          ++passing;
          const double floor = std::min(std::abs(tm.trace_of(e.x)), std::abs(tm.trace_of(e.y)));
          std::vector<Slope> tail;
          collect_tail(e, 6, tail);
          for (const auto& s : tail) CHECK(std::abs(tm.trace_of(s)) > floor);
        }
        const auto [a, b] = expand_edge(e);
        next.push_back(a);
        next.push_back(b);
      }
      level = next;
    }
  }
  CHECK(passing > 50);
}

TEST_CASE("fan escape") {
  // x = 0 gives y_n periodic with period 4, never escaping.
  CHECK_FALSE(fan_escape(0.0, 3.0, 5.0).ok);
  // A real |x| <= 2 is never accepted.
  CHECK_FALSE(fan_escape(1.0, 5.0, 7.0).ok);
  const Complex x(1.5, std::sqrt(3.0) / 2);
  const FanWitness w = fan_escape(x, Complex(0, 3.5), x * Complex(0, 3.5) - x);
  if (w.ok) {
    Complex prev(0, 3.5), cur = x * prev - x;
    for (int n = 1; n < 300; ++n) {
      CHECK(std::abs(cur) > 2);
      const Complex next = x * cur - prev;
      prev = cur;
      cur = next;
    }
  }
}

TEST_CASE("BQ verdict table") {
  const Character markoff = Character::from_triple(3, 3, 3);
  const BQVerdict a = check_bq(markoff);
  CHECK(a.kind == VerdictKind::kAccepted);
  CHECK(a.tree.size() == 1);
  CHECK(a.circular.size() == 3);

  const Character flat = Character::from_triple(2, 2, 2);
  CHECK(check_bq(flat, 64, BQVariant::kClosed).kind == VerdictKind::kRejectedInterval);
  const BQVerdict many = check_bq(flat, 64, BQVariant::kExtended);
  CHECK(many.kind == VerdictKind::kRejectedInfinitelyMany);
  CHECK(many.small_count > many.small_bound);

  for (Complex y : {Complex(3), Complex(1, 1), Complex(-5, 2)}) {
    for (Complex z : {Complex(3), Complex(0.5, -2)}) {
      for (auto variant : {BQVariant::kClosed, BQVariant::kExtended}) {
        const BQVerdict r = check_bq(Character::from_triple(0, y, z), 64, variant);
        CHECK(r.kind == VerdictKind::kRejectedInterval);
        CHECK(r.slope == S(0, 1));
      }
    }
  }
  // A zero trace deeper in the tree: phi(1/2) = x z - y.
  const Character deep = Character::from_triple(3, 9, 3);
  const BQVerdict d = check_bq(deep);
  CHECK(d.kind == VerdictKind::kRejectedInterval);
  CHECK(d.trace == Complex(0));
}

TEST_CASE("accepted certificates are sound and stable") {
  std::mt19937_64 rng(44);
  int accepted = 0;
  for (int i = 0; i < 200; ++i) {
    const Character c = random_character(rng, 3);
    const BQVerdict v = check_bq(c, 16);
    CHECK(v.guard_violations == 0);
    const BQVerdict w = check_bq(c, 32);
    if (v.kind != VerdictKind::kUndetermined) CHECK(w.kind == v.kind);
    if (v.kind != VerdictKind::kAccepted) continue;
    ++accepted;
    TraceMap tm(c);
    // The witnesses are exactly the circular set of the tree.
    const auto circ = circular_set(v.tree);
    CHECK(circ.size() == v.circular.size());
    for (const auto& w : v.circular) {
      CHECK(std::any_of(circ.begin(), circ.end(),
                        [&](const DirectedEdge& e) { return e.same_as(w.edge); }));
      if (w.method == "escape") CHECK(escape_criterion(tm, w.edge.reversed()));
      // Nothing beyond a circular edge is small.
      std::vector<Slope> tail;
      collect_tail(w.edge.reversed(), 7, tail);
      for (const auto& s : tail) CHECK(std::abs(tm.trace_of(s)) > 2);
    }
    CHECK(fibonacci_growth_constant(tm, v.tree, 30) > 0);
  }
  CHECK(accepted > 20);
  TraceMap tm(Character::from_triple(3, 3, 3));
  const double k = fibonacci_growth_constant(tm, check_bq(tm.character()).tree, 40);
  CHECK(k > 0);
  CHECK(k < std::log(3.0));
}

TEST_CASE("relative BQ") {
  const Character fig8 = figure_eight();
  const MCGElement rl = MCGElement::from_word("RL");
  TraceMap tm(fig8);
  for (const auto& s : enumerate_slopes(8)) {
    CHECK(std::abs(tm.trace_of(mcg_act_on_slope(rl, s)) - tm.trace_of(s)) <
          1e-9 * std::max(1.0, std::abs(tm.trace_of(s))));
  }
  const BQVerdict v = check_relative_bq(fig8, rl);
  CHECK(v.kind == VerdictKind::kAccepted);
  CHECK(check_relative_bq(fig8, rl, 128).kind == VerdictKind::kAccepted);

  // A real fixed character with traces inside (-2, 2).
  bool rejected = false;
  for (const auto& c : fixed_characters_of(rl, -0.25)) {
    if (std::abs(c.x + 1.0) < 1e-8 && std::abs(c.y - 0.5) < 1e-8) {
      const BQVerdict r = check_relative_bq(c, rl);
      CHECK(r.kind == VerdictKind::kRejectedInterval);
      rejected = true;
    }
  }
  CHECK(rejected);

  CHECK_THROWS_AS(check_relative_bq(Character::from_triple(3, 3, 3), rl), InvalidArgument);
  CHECK_THROWS_AS(check_relative_bq(fig8, MCGElement::from_word("R")), InvalidArgument);
}
