#pragma once

// Mapping classes of the one-holed torus as words in R = [[1,1],[0,1]] and
// L = [[1,0],[1,1]], their action on slopes and characters, fixed characters
// and the conjugating element of a fixed representation.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mcshane/charvariety.hpp"

namespace mcshane {

// Letters R, L and their inverses r, l.
class MCGElement {
 public:
  MCGElement() = default;  // identity

  // Accepts letters from "RLrl"; whitespace is ignored. "I" or "" is the
  // identity.
  static MCGElement from_word(const std::string& word);

  const std::array<std::int64_t, 4>& matrix() const { return m_; }  // a b c d
  const std::string& word() const { return word_; }
  std::int64_t trace() const { return m_[0] + m_[3]; }
  bool is_anosov() const { return trace() > 2 || trace() < -2; }
  MCGElement inverse() const;

 private:
  std::array<std::int64_t, 4> m_{1, 0, 0, 1};
  std::string word_;
};

Slope mcg_act_on_slope(const MCGElement& theta, const Slope& s);

// New base values phi(theta^-1 . 0/1), phi(theta^-1 . inf), phi(theta^-1 . 1/1).
Character mcg_act_on_character(const MCGElement& theta, const Character& c);

// Free-group words over X = 1, Y = 2; negative letters are inverses.
using FreeWord = std::vector<int>;

FreeWord free_reduce(const FreeWord& w);
FreeWord free_inverse(const FreeWord& w);
// Image of w under the fixed lift of theta: R is X -> XY, Y -> Y and L is
// X -> X, Y -> YX, composed in word order.
FreeWord apply_lift(const MCGElement& theta, const FreeWord& w);
Mat2 evaluate(const MatrixRep& m, const FreeWord& w);

struct FixedPointOptions {
  int seeds = 200;
  double box = 5;
  int iterations = 50;
  double tolerance = 1e-12;
  double coalesce = 1e-6;
  std::uint64_t rng_seed = 0x6d63736861ULL;
};

// Characters c with theta . c = c and the given kappa, found by damped
// Gauss-Newton from random seeds. Results are coalesced and sorted.
std::vector<Character> fixed_characters_of(const MCGElement& theta, Complex kappa,
                                           const FixedPointOptions& opts = {});

// Largest deviation |phi_c(theta^-1 s) - phi_c(s)| over the base slopes,
// relative to the size of the base values.
double fixedness_residual(const MCGElement& theta, const Character& c);

struct Conjugator {
  Mat2 a;
  LogClass l_a;       // 2 acosh_pos(-tr A / 2) mod 2 pi i
  double residual;    // max entrywise error of A rho(lift(g)) A^-1 = rho(g)
};

// Throws DegenerateCharacterError if the conjugation system has a solution
// space of dimension > 1 (reducible input) and InvalidArgument if it has none
// (character not fixed by theta).
Conjugator conjugator_for(const MCGElement& theta, const MatrixRep& m);

// A fixed point of a hyperbolic integer Moebius map, (A + sign sqrt(D)) / B.
struct QuadraticIrrational {
  std::int64_t a = 0, b = 1, d = 0;
  int sign = 1;

  double value() const;
  // Sign of s - this; infinity is larger than every real.
  int compare(const Slope& s) const;
};

// The invariant axis of an Anosov class in the dual tree, one period long.
struct AnosovAxis {
  QuadraticIrrational repelling, attracting;
  std::vector<DirectedEdge> crossed;   // crossed[k+1] follows crossed[k]
  std::vector<Slope> regions;          // regions first met in this period
  std::vector<DirectedEdge> branches;  // edges leaving the axis, one per vertex
};

AnosovAxis anosov_axis(const MCGElement& theta);

// True iff s lies on the open arc running upward from the repelling to the
// attracting fixed point.
bool in_left_side(const AnosovAxis& axis, const Slope& s);

// A fundamental domain for <theta> acting on slopes: the axis regions of one
// period plus all branch slopes with combinatorial length <= max_size.
// Returned in canonical order.
std::vector<Slope> orbit_representatives(const AnosovAxis& axis, std::int64_t max_size);

}  // namespace mcshane
