#pragma once

// SL(2,C) characters of the one-holed torus in Fricke coordinates, the trace
// map they induce on slopes, and explicit matrix holonomy.

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>
#include <shared_mutex>
#include <unordered_map>

#include "mcshane/complexarith.hpp"
#include "mcshane/fareytree.hpp"

namespace mcshane {

// kappa together with the traces at the base triple (0/1, inf, 1/1):
// x = tr X, y = tr Y, z = tr XY.
struct Character {
  Complex kappa{};
  Complex x{}, y{}, z{};

  // kappa taken from the vertex relation.
  static Character from_triple(Complex x, Complex y, Complex z);

  Complex residual() const;
};

Complex vertex_residual(Complex x, Complex y, Complex z, Complex kappa);

// Residual divided by max(1, |x|^2 + |y|^2 + |z|^2 + |xyz|). Deep in the tree
// the individual terms grow far beyond 1/epsilon, so only the relative size
// of the cancellation is meaningful in floating point.
double relative_vertex_residual(Complex x, Complex y, Complex z, Complex kappa);

inline Complex propagate_edge(Complex x, Complex y, Complex z) { return x * y - z; }

// Value of the trace map at s, obtained by walking the Stern-Brocot path from
// the base triple and applying the edge relation at each step. Works for any
// commutative ring T (floating complex, exact rationals, dual numbers).
template <class T>
T trace_by_descent(const T& x, const T& y, const T& z, const Slope& s);

// Trace map of a fixed character with a shared memo table.
//
// Readers and writers of distinct slopes may run concurrently. Every step of
// every descent checks the vertex relation; the largest relative residual
// seen is kept for diagnostics.
class TraceMap {
 public:
  explicit TraceMap(Character c);
  TraceMap(const TraceMap&) = delete;
  TraceMap& operator=(const TraceMap&) = delete;

  const Character& character() const { return c_; }
  Complex trace_of(const Slope& s) const;

  double max_relative_residual() const;
  std::size_t memo_size() const;

  // Seeds the memo, e.g. from a cache. Values must agree with existing
  // entries to a relative 1e-9; mismatches throw.
  void insert(const Slope& s, Complex value) const;
  std::vector<std::pair<Slope, Complex>> memo_snapshot() const;

  // Raised bound on the relative vertex residual; a step above it throws.
  static constexpr double kResidualLimit = 1e-9;

 private:
  Character c_;
  mutable std::shared_mutex mu_;
  mutable std::unordered_map<Slope, Complex, SlopeHash> memo_;
  mutable double max_residual_ = 0;
};

// Exact arithmetic for rational characters.
using Rational = boost::multiprecision::cpp_rational;

struct ExactCharacter {
  Rational x, y, z;
  Rational kappa() const;
};

Rational exact_trace(const ExactCharacter& c, const Slope& s);

using Mat2 = Eigen::Matrix2cd;

struct MatrixRep {
  Mat2 ax;
  Mat2 ay;
};

// (tr Ax, tr Ay, tr AxAy) and kappa = tr [Ax, Ay]. Throws InvalidArgument if
// a determinant differs from 1 by more than 1e-12 (relative to the entries).
Character character_from_matrices(const MatrixRep& m);

// Ax = [[x, 1], [-1, 0]], Ay = [[y, s], [-1/s, 0]] with s the root of larger
// modulus of s^2 - (xy - z) s + 1 (ties: Im s >= 0).
MatrixRep matrices_from_character(const Character& c);

struct HalfLength {
  Complex value;
};

// acosh_pos(-trace/2). Throws EllipticTraceError for real traces in [-2, 2].
HalfLength half_length(Complex trace);
// Twice the half length; e^l depends only on trace^2.
Complex complex_length(Complex trace);

bool is_real_interval_trace(Complex t, bool closed);

// Rank-two holonomy of a pair of pants with boundary traces t1, t2 and
// t3 = tr(ab). Each t must be real and < -2.
std::pair<MatrixRep, Character> pants_holonomy(Complex t1, Complex t2, Complex t3);

}  // namespace mcshane

#include "mcshane/detail/trace_descent.hpp"
