#include "mcshane/complexarith.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "mcshane/errors.hpp"

namespace mcshane {

std::string to_string(Modulus m) {
  switch (m) {
    case Modulus::kTwoPiI:
      return "2pi_i";
    case Modulus::kPiI:
      return "pi_i";
    case Modulus::kNone:
      return "none";
  }
  return "unknown";
}

namespace {

// Reduces t into (-half, half].
double reduce_half_open(double t, double period) {
  const double half = period / 2;
  double r = std::remainder(t, period);  // in [-half, half]
  if (r <= -half) r += period;
  return r;
}

}  // namespace

Complex canonical_rep(Complex z, Modulus m) {
  switch (m) {
    case Modulus::kTwoPiI:
      return {z.real(), reduce_half_open(z.imag(), 2 * kPi)};
    case Modulus::kPiI:
      return {z.real(), reduce_half_open(z.imag(), kPi)};
    case Modulus::kNone:
      return z;
  }
  return z;
}

double LogClass::distance(Complex z) const {
  return std::abs(canonical_rep(z - value, modulus));
}

Complex acosh_pos(Complex z) {
  Complex w = std::acosh(z);
  // One Newton step tightens the inverse near |z| ~ 1 where acosh is steep.
  const Complex s = std::sinh(w);
  if (std::abs(s) > 1e-4) {
    const Complex step = (std::cosh(w) - z) / s;
    if (std::abs(step) < 1e-6) w -= step;
  }
  if (w.real() < 0 || (w.real() == 0 && w.imag() < 0)) w = -w;
  if (w.real() == 0) {
    // Tie-break on the imaginary axis: Im in [0, pi].
    double t = std::abs(reduce_half_open(w.imag(), 2 * kPi));
    return {0.0, t};
  }
  return {w.real(), reduce_half_open(w.imag(), 2 * kPi)};
}

Complex atanh_principal(Complex z) {
  if (std::abs(1.0 - z) < kPoleThreshold || std::abs(1.0 + z) < kPoleThreshold) {
    throw PoleError("atanh pole at z = " + format_complex(z));
  }
  Complex w = std::atanh(z);
  // std::atanh honours the sign of a zero imaginary part on the cut |x| > 1.
  // The principal-log form always lands on +pi/2 there.
  if (z.imag() == 0 && std::abs(z.real()) > 1) w = {w.real(), kPi / 2};
  return w;
}

Complex gap_G(Complex x, Complex y, Complex z) {
  const Complex den = std::cosh(x) + std::exp(y + z);
  if (std::abs(den) < kPoleThreshold) throw PoleError("gap_G denominator vanishes");
  return 2.0 * atanh_principal(std::sinh(x) / den);
}

Complex gap_G_log(Complex x, Complex y, Complex z) {
  const Complex e = std::exp(y + z);
  const Complex num = std::exp(x) + e;
  const Complex den = std::exp(-x) + e;
  if (std::abs(den) < kPoleThreshold || std::abs(num) < kPoleThreshold) {
    throw PoleError("gap_G log form pole");
  }
  return std::log(num / den);
}

Complex gap_S(Complex x, Complex y, Complex z) {
  const Complex den = std::cosh(z) + std::cosh(x) * std::cosh(y);
  if (std::abs(den) < kPoleThreshold) throw PoleError("gap_S denominator vanishes");
  return atanh_principal(std::sinh(x) * std::sinh(y) / den);
}

Complex gap_S_log(Complex x, Complex y, Complex z) {
  const Complex num = std::cosh(z) + std::cosh(x + y);
  const Complex den = std::cosh(z) + std::cosh(x - y);
  if (std::abs(den) < kPoleThreshold || std::abs(num) < kPoleThreshold) {
    throw PoleError("gap_S log form pole");
  }
  return 0.5 * std::log(num / den);
}

bool eq_mod(Complex a, Complex b, Modulus m, double tol) {
  if (!(tol > 0)) throw InvalidArgument("eq_mod: tolerance must be positive");
  return std::abs(canonical_rep(a - b, m)) < tol;
}

namespace {

bool parse_number(const char*& p, double& out) {
  char* end = nullptr;
  out = std::strtod(p, &end);
  if (end == p) return false;
  p = end;
  return true;
}

}  // namespace

Complex parse_complex(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (c != ' ' && c != '\t') s.push_back(c);
  }
  if (s.empty()) throw ParseError("empty complex literal");
  auto fail = [&]() -> Complex { throw ParseError("malformed complex literal '" + text + "'"); };

  const char* p = s.c_str();
  const char* end = p + s.size();

  // Leading bare imaginary unit: "i", "+i", "-i".
  auto unit_imag = [&](const char* q, double& sign) {
    sign = 1;
    if (*q == '+' || *q == '-') {
      sign = (*q == '-') ? -1 : 1;
      ++q;
    }
    return *q == 'i' && q + 1 == end;
  };

  double sign = 1;
  if (unit_imag(p, sign)) return {0.0, sign};

  double first = 0;
  if (!parse_number(p, first)) return fail();
  if (p == end) return {first, 0.0};
  if (*p == 'i') {
    if (p + 1 != end) return fail();
    return {0.0, first};
  }
  if (*p != '+' && *p != '-') return fail();
  if (unit_imag(p, sign)) return {first, sign};
  double second = 0;
  if (!parse_number(p, second)) return fail();
  if (p + 1 != end || *p != 'i') return fail();
  return {first, second};
}

std::string format_complex(Complex z) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
  return buf;
}

}  // namespace mcshane
