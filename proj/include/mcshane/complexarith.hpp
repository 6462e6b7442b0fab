#pragma once

// Branch-consistent complex special functions used for lengths and gap terms.
//
// All branch cuts follow the principal logarithm: imaginary part in (-pi, pi].

#include <complex>
#include <numbers>
#include <string>

namespace mcshane {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

// Denominators with absolute value below this raise PoleError.
inline constexpr double kPoleThreshold = 1e-14;

enum class Modulus {
  kTwoPiI,  // C / 2 pi i Z
  kPiI,     // C / pi i Z
  kNone,    // plain complex equality
};

std::string to_string(Modulus m);

// Reduces z to the canonical representative of its class: imaginary part in
// (-pi, pi] for 2 pi i, in (-pi/2, pi/2] for pi i. kNone returns z.
Complex canonical_rep(Complex z, Modulus m);

// A complex number viewed as an element of C / (modulus) Z.
struct LogClass {
  Complex value{};
  Modulus modulus = Modulus::kTwoPiI;

  Complex canonical() const { return canonical_rep(value, modulus); }

  // Distance from z to this class, measured on the canonical representative
  // of z - value.
  double distance(Complex z) const;
};

// Inverse hyperbolic cosine with Re >= 0. On Re = 0 the imaginary part is
// taken in [0, pi]; otherwise the imaginary part is in (-pi, pi].
Complex acosh_pos(Complex z);

// 1/2 log((1+z)/(1-z)) with the principal logarithm. Throws PoleError at +-1.
Complex atanh_principal(Complex z);

// Main-gap function: 2 atanh(sinh x / (cosh x + exp(y+z))).
Complex gap_G(Complex x, Complex y, Complex z);
// log((e^x + e^(y+z)) / (e^-x + e^(y+z))), equal to gap_G modulo 2 pi i.
Complex gap_G_log(Complex x, Complex y, Complex z);

// Side-gap function: atanh(sinh x sinh y / (cosh z + cosh x cosh y)).
Complex gap_S(Complex x, Complex y, Complex z);
// 1/2 log((cosh z + cosh(x+y)) / (cosh z + cosh(x-y))).
Complex gap_S_log(Complex x, Complex y, Complex z);

// True iff the canonical representative of a - b has absolute value < tol.
bool eq_mod(Complex a, Complex b, Modulus m, double tol);

// Parses "a+bi", "a-bi", "a", "bi", "-i" and friends. Throws ParseError.
Complex parse_complex(const std::string& text);
std::string format_complex(Complex z);

}  // namespace mcshane
