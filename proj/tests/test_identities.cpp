#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <random>

#include "mcshane/compensated_sum.hpp"
#include "mcshane/identities.hpp"

using namespace mcshane;

namespace {

Character figure_eight(Complex kappa = -2.0) {
  for (const auto& c : fixed_characters_of(MCGElement::from_word("RL"), kappa)) {
    if (c.x.imag() > 0.5 && std::abs(c.x) > 1) return c;
  }
  throw std::runtime_error("no figure-eight type character");
}

// A uniformly random walk of `depth` steps away from the base vertex.
DirectedEdge random_edge(std::mt19937_64& rng, int depth) {
  const auto in = edges_into(base_triple());
  DirectedEdge e = in[rng() % 3].reversed();
  for (int i = 0; i < depth; ++i) {
    const auto [a, b] = expand_edge(e);
    e = rng() % 2 ? a : b;
  }
  return rng() % 2 ? e : e.reversed();
}

FiniteSubtree random_subtree(std::mt19937_64& rng, int vertices) {
  FiniteSubtree t = FiniteSubtree::single(base_triple());
  while (static_cast<int>(t.size()) < vertices) {
    const auto in = circular_set(t);
    t.grow(in[rng() % in.size()].reversed());
  }
  return t;
}

}  // namespace

TEST_CASE("nu") {
  CHECK(std::abs(nu_of(-2.0).value) < 1e-12);
  CHECK(std::abs(nu_of(-18.0).value - 2.8872709503576206) < 1e-12);
  CHECK(std::abs(std::cosh(nu_of(2.0).value) + 1.0) < 1e-12);
  CHECK(nu_of(2.0).distance(Complex(0, kPi)) < 1e-6);
}

TEST_CASE("cusped term") {
  const double sqrt5 = std::sqrt(5.0);
  CHECK(std::abs(cusped_term(3.0) - 1.0 / (1 + (7 + 3 * sqrt5) / 2)) < 1e-14);
  CHECK(std::abs(cusped_term(3.0) - 0.1273220037) < 1e-10);
  CHECK(std::abs(cusped_term(6.0) - 1.0 / (1 + 17 + 12 * std::sqrt(2.0))) < 1e-14);
  CHECK(std::abs(cusped_term(1e12)) < 1e-23);
  CHECK(std::abs(cusped_term(-3.0) - cusped_term(3.0)) < 1e-15);
  CHECK_THROWS_AS(cusped_term(1.5), EllipticTraceError);
}

TEST_CASE("mcshane term") {
  const LogClass nu = nu_of(-18.0);
  CHECK(std::abs(mcshane_term(3.0, nu_of(-2.0))) < 1e-15);
  CHECK(std::abs(mcshane_term(Complex(5, 2), nu_of(-2.0))) < 1e-15);
  CHECK_THROWS_AS(mcshane_term(0.5, nu), EllipticTraceError);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-6, 6);
  for (int i = 0; i < 500; ++i) {
    const Complex t(u(rng), u(rng));
    const Complex kappa(u(rng) * 3, u(rng));
    if (is_real_interval_trace(t, true)) continue;
    const LogClass n = nu_of(kappa);
    const Complex half = half_length(t).value;
    Complex g;
    try {
      g = gap_G(n.value, half, half);
    } catch (const PoleError&) {
      continue;
    }
    CHECK(eq_mod(mcshane_term(t, n), g, Modulus::kTwoPiI, 1e-10));
  }
  CHECK(eq_mod(mcshane_term(3.0, nu), gap_G(nu.value, half_length(3.0).value,
                                            half_length(3.0).value),
               Modulus::kTwoPiI, 1e-12));

  // l -> 0 gives nu, Re l -> infinity gives 0.
  CHECK(nu.distance(mcshane_term(-2.0 - 1e-11, nu)) < 1e-5);
  CHECK(std::abs(mcshane_term(1e15, nu)) < 1e-25);
  CHECK(std::isfinite(std::abs(mcshane_term(Complex(1e300, 1e300), nu))));
}

TEST_CASE("edge weights at kappa = -2") {
  TraceMap tm(Character::from_triple(3, 3, 3));
  const DirectedEdge e = edges_into(base_triple())[0];
  CHECK(std::abs(tm.trace_of(e.to) - 3.0) < 1e-15);
  CHECK(std::abs(psi_edge(tm, e).value - 1.0 / 3) < 1e-15);
  CHECK(std::abs(psi_edge(tm, e.reversed()).value - 2.0 / 3) < 1e-15);
  CHECK(std::abs(circular_psi_sum(tm, FiniteSubtree::single(base_triple())) - 1.0) < 1e-15);

  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const DirectedEdge f = random_edge(rng, static_cast<int>(rng() % 14));
    const Complex s = psi_edge(tm, f).value + psi_edge(tm, f.reversed()).value;
    CHECK(std::abs(s - 1.0) < 1e-10);
  }
  for (int i = 0; i < 50; ++i) {
    const FiniteSubtree t = random_subtree(rng, 1 + static_cast<int>(rng() % 12));
    CHECK(std::abs(circular_psi_sum(tm, t) - 1.0) < 1e-9);
  }
}

TEST_CASE("edge weights for general kappa") {
  std::mt19937_64 rng(6);
  const std::vector<Character> chars = {
      Character::from_triple(4, 4, 4),
      Character::from_triple(Complex(3, 0.3), Complex(3, -0.2), Complex(3, 0.1)),
      Character::from_triple(Complex(-2.5, 1), Complex(3, 0.5), Complex(-4, -1)),
  };
  for (const auto& c : chars) {
    TraceMap tm(c);
    const LogClass nu = nu_of(c.kappa);
    for (int i = 0; i < 500; ++i) {
      const DirectedEdge f = random_edge(rng, static_cast<int>(rng() % 10));
      const Complex s = psi_edge(tm, f).value + psi_edge(tm, f.reversed()).value;
      CHECK(nu.distance(s) < 1e-10);
    }
    Complex previous = circular_psi_sum(tm, FiniteSubtree::single(base_triple()));
    FiniteSubtree grown = FiniteSubtree::single(base_triple());
    for (int i = 0; i < 30; ++i) {
      const auto in = circular_set(grown);
      grown.grow(in[rng() % in.size()].reversed());
      const Complex now = circular_psi_sum(tm, grown);
      CHECK(eq_mod(now, previous, Modulus::kTwoPiI, 1e-10));
      previous = now;
    }
    for (int i = 0; i < 50; ++i) {
      const FiniteSubtree t = random_subtree(rng, 1 + static_cast<int>(rng() % 12));
      CHECK(nu.distance(circular_psi_sum(tm, t)) < 1e-9);
    }
  }
  CHECK(std::abs(nu_of(-18.0).value - 2.8872709503576206) < 1e-12);
}

TEST_CASE("edge weight limit at kappa = -2") {
  const double eps = 1e-6;
  const Character near = Character::from_triple(3, 3, 3.0 + eps / 3);
  TraceMap tm(near);
  const Complex nu = nu_of(near.kappa).value;
  CHECK(std::abs(near.kappa + 2.0) < 1e-5);
  std::mt19937_64 rng(8);
  for (int i = 0; i < 50; ++i) {
    const DirectedEdge e = random_edge(rng, static_cast<int>(rng() % 8));
    const Complex z = tm.trace_of(e.to), x = tm.trace_of(e.x), y = tm.trace_of(e.y);
    const Complex ratio = psi_edge(tm, e).value / nu;
    CHECK(std::abs(ratio - z / (x * y)) < 1e-2);
  }
}

TEST_CASE("edge weight poles") {
  TraceMap tm(Character::from_triple(0, 3, 3));
  bool any_pole = false;
  for (const auto& f : edges_into(base_triple())) {
    try {
      psi_edge(tm, f);
    } catch (const PoleError&) {
      any_pole = true;
    }
  }
  CHECK(any_pole);
}

TEST_CASE("classical identities") {
  const auto start = std::chrono::steady_clock::now();
  const SumReport cusped = sum_identity(Character::from_triple(3, 3, 3), SumMode::kCusped);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(cusped.residual < 1e-6);
  CHECK(std::abs(cusped.value() - 0.5) < 1e-6);
  CHECK(seconds < 10);
  CHECK(cusped.partials.size() == 60);
  CHECK(cusped.partials.back().depth == 60);
  CHECK(cusped.terms_used == enumerate_slopes(60).size());
  CHECK(cusped.max_tail_term < 1e-12);

  const SumReport bow = sum_identity(Character::from_triple(4, 4, 4), SumMode::kBowditch);
  CHECK(bow.residual < 1e-6);
  CHECK(eq_mod(bow.value(), std::acosh(9.0), Modulus::kTwoPiI, 1e-6));

  const auto [m, c] = pants_holonomy(-3, -3, -3);
  CHECK(std::abs(c.kappa - 52.0) < 1e-12);
  const SumReport pants = sum_identity(c, SumMode::kPants);
  CHECK(pants.target.modulus == Modulus::kPiI);
  CHECK(pants.residual < 1e-6);
  CHECK(eq_mod(pants.value(), acosh_pos(-26.0), Modulus::kPiI, 1e-6));

  const Character generic =
      Character::from_triple(Complex(3, 0.3), Complex(3, -0.2), Complex(3, 0.1));
  CHECK(sum_identity(generic, SumMode::kBowditch).residual < 1e-6);
}

TEST_CASE("BQ precondition") {
  const Character c = Character::from_triple(2, 2, 2);
  CHECK(std::abs(c.kappa - 2.0) < 1e-15);
  try {
    sum_identity(c, SumMode::kBowditch);
    FAIL("expected BQFailure");
  } catch (const BQFailure& e) {
    CHECK(e.kind() != VerdictKind::kAccepted);
  }
  SumOptions forced;
  forced.force = true;
  CHECK_THROWS_AS(sum_identity(c, SumMode::kBowditch, forced), EllipticTraceError);
  CHECK_THROWS_AS(sum_identity(Character::from_triple(4, 4, 4), SumMode::kCusped),
                  InvalidArgument);
  CHECK_THROWS_AS(sum_identity(Character::from_triple(0, 3, 3), SumMode::kBowditch), BQFailure);
}

TEST_CASE("residual decay") {
  for (const auto& [c, mode] : {std::pair{Character::from_triple(3, 3, 3), SumMode::kCusped},
                                std::pair{Character::from_triple(4, 4, 4), SumMode::kBowditch}}) {
    SumOptions opts;
    opts.max_size = 40;
    const SumReport r = sum_identity(c, mode, opts);
    // Nonincreasing after a short burn-in, up to rounding.
    for (std::size_t i = 5; i + 1 < r.partials.size(); ++i) {
      CHECK(r.partials[i + 1].residual <= r.partials[i].residual + 1e-15);
    }
    // Least-squares slope of log residual against depth while above rounding.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& p : r.partials) {
      if (p.depth < 3 || p.residual < 1e-13) continue;
      const double y = std::log(p.residual);
      sx += p.depth, sy += y, sxx += p.depth * p.depth, sxy += p.depth * y;
      ++n;
    }
    REQUIRE(n >= 5);
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope < -0.3);
  }
}

TEST_CASE("reordering robustness") {
  const Character generic =
      Character::from_triple(Complex(3, 0.3), Complex(3, -0.2), Complex(3, 0.1));
  const double tol = 1e-6;
  for (const auto& [c, mode] : {std::pair{Character::from_triple(3, 3, 3), SumMode::kCusped},
                                std::pair{Character::from_triple(4, 4, 4), SumMode::kBowditch},
                                std::pair{generic, SumMode::kBowditch}}) {
    const SumReport r = sum_identity(c, mode);
    TraceMap tm(c);
    const LogClass nu = nu_of(c.kappa);
    std::vector<Slope> slopes = enumerate_slopes(60);
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 5; ++trial) {
      std::shuffle(slopes.begin(), slopes.end(), rng);
      CompensatedComplexSum sum;
      for (const auto& s : slopes) {
        const Complex t = tm.trace_of(s);
        sum.add(mode == SumMode::kCusped ? cusped_term(t) : mcshane_term(t, nu));
      }
      CHECK(r.target.distance(sum.get()) < 2 * tol);
      CHECK(std::abs(sum.get() - r.value()) < 2 * tol);
    }
  }
}

TEST_CASE("parallel evaluation is bitwise identical") {
  const Character generic =
      Character::from_triple(Complex(3, 0.3), Complex(3, -0.2), Complex(3, 0.1));
  SumOptions one, many;
  many.jobs = 4;
  const SumReport a = sum_identity(generic, SumMode::kBowditch, one);
  const SumReport b = sum_identity(generic, SumMode::kBowditch, many);
  REQUIRE(a.partials.size() == b.partials.size());
  for (std::size_t i = 0; i < a.partials.size(); ++i) {
    CHECK(a.partials[i].value == b.partials[i].value);
  }
  CHECK(a.max_tail_term == b.max_tail_term);
}

TEST_CASE("slope classes") {
  CHECK(slope_class(canonical_slope(0, 1)) == SlopeClass::k01);
  CHECK(slope_class(Slope::infinity()) == SlopeClass::k10);
  CHECK(slope_class(canonical_slope(1, 1)) == SlopeClass::k11);
  CHECK(slope_class(canonical_slope(-3, 2)) == SlopeClass::k10);
  CHECK(parse_slope_class("11") == SlopeClass::k11);
  CHECK_THROWS_AS(parse_slope_class("00"), ParseError);
  // Farey neighbours always lie in different classes.
  const auto slopes = enumerate_slopes(12);
  for (const auto& a : slopes) {
    for (const auto& b : slopes) {
      if (are_farey_neighbors(a, b)) CHECK(slope_class(a) != slope_class(b));
    }
  }
}

TEST_CASE("Weierstrass identities") {
  CHECK(std::abs(symmetric_trace(-2) - 3) < 1e-14);
  CHECK(std::abs(symmetric_trace(-18) - 4) < 1e-14);
  CHECK_THROWS_AS(symmetric_trace(2), InvalidArgument);

  const Character c = Character::from_triple(3, 3, 3);
  double total = 0;
  for (auto cls : {SlopeClass::k01, SlopeClass::k10, SlopeClass::k11}) {
    const SumReport r = weierstrass_sum(c, cls);
    CHECK(r.residual < 1e-6);
    CHECK(std::abs(r.value() - kPi / 2) < 1e-6);
    total += r.value().real();
    const SumReport via_angle = weierstrass_sum(0.0, WeierstrassKind::kCone, cls);
    CHECK(std::abs(via_angle.value() - r.value()) < 1e-12);
  }
  CHECK(std::abs(total - 3 * kPi / 2) < 3e-6);

  std::vector<double> sums;
  for (auto cls : {SlopeClass::k01, SlopeClass::k10, SlopeClass::k11}) {
    const SumReport r = weierstrass_sum(2 * std::acosh(9.0), WeierstrassKind::kBoundary, cls);
    CHECK(r.residual < 1e-6);
    sums.push_back(r.value().real());
  }
  CHECK(std::abs(sums[0] - sums[1]) < 1e-8);
  CHECK(std::abs(sums[1] - sums[2]) < 1e-8);

  for (double theta : {0.5, 1.0, 2.0}) {
    CHECK(weierstrass_sum(theta, WeierstrassKind::kCone, SlopeClass::k11).residual < 1e-6);
  }
  CHECK_THROWS_AS(weierstrass_sum(7.0, WeierstrassKind::kCone, SlopeClass::k01),
                  InvalidArgument);
  CHECK_THROWS_AS(weierstrass_sum(Character::from_triple(Complex(3, 0.1), 3, 3), SlopeClass::k01),
                  InvalidArgument);
}

TEST_CASE("bundle sums for the figure-eight fiber") {
  const MCGElement rl = MCGElement::from_word("RL");
  const Character c = figure_eight();
  SumOptions opts;
  opts.max_size = 60;
  const BundleSums b = bundle_sums(c, rl, opts);
  CHECK(b.full.residual < 1e-5);
  CHECK(b.half.residual < 1e-5);
  CHECK(std::abs(b.half.target_sign) == 1);
  CHECK(b.conjugator.residual < 1e-8);

  // The cusped summand keeps the information that nu = 0 erases: its half sum
  // is the cusp modulus, computed here from the matrices alone.
  const BundleSums cb = bundle_sums(c, rl, opts, true);
  CHECK(cb.full.residual < 1e-5);
  CHECK(cb.half.residual < 1e-8);
  // Cusp shape 2 sqrt(3) i of the figure-eight knot complement.
  CHECK(std::abs(std::abs(cb.half.target.value) - 1 / (2 * std::sqrt(3.0))) < 1e-8);

  // Orbit invariance of the summand.
  TraceMap tm(c);
  const LogClass nu = nu_of(Complex(-2.3));
  const Character d = figure_eight(-2.3);
  TraceMap td(d);
  for (const auto& s : orbit_representatives(anosov_axis(rl), 20)) {
    const Slope image = mcg_act_on_slope(rl, s);
    if (combinatorial_length(image) > 60) continue;
    CHECK(std::abs(cusped_term(tm.trace_of(image)) - cusped_term(tm.trace_of(s))) < 1e-10);
    CHECK(std::abs(mcshane_term(td.trace_of(image), nu) - mcshane_term(td.trace_of(s), nu)) <
          1e-10);
  }
}

TEST_CASE("bundle sums away from the cusp") {
  const MCGElement rl = MCGElement::from_word("RL");
  SumOptions opts;
  opts.max_size = 40;
  for (Complex kappa : {Complex(-2.3), Complex(-2, 0.4), Complex(-3)}) {
    const BundleSums b = bundle_sums(figure_eight(kappa), rl, opts);
    CHECK(b.full.residual < 1e-5);
    CHECK(b.half.residual < 1e-8);
    CHECK(std::abs(b.conjugator.l_a.canonical()) > 0.1);
  }
  const MCGElement rrl = MCGElement::from_word("RRL");
  opts.max_size = 80;
  const auto fixed = fixed_characters_of(rrl, -2.5);
  int checked = 0;
  for (const auto& c : fixed) {
    try {
      const BundleSums b = bundle_sums(c, rrl, opts);
      CHECK(b.full.residual < 1e-5);
      CHECK(b.half.residual < 1e-6);
      ++checked;
    } catch (const BQFailure&) {
    }
  }
  CHECK(checked > 0);
  CHECK_THROWS_AS(bundle_sums(Character::from_triple(3, 3, 3), rl, opts), InvalidArgument);
}
