#include "mcshane/charvariety.hpp"

#include <cmath>
#include <mutex>

#include "mcshane/errors.hpp"

namespace mcshane {

Character Character::from_triple(Complex x, Complex y, Complex z) {
  return {x * x + y * y + z * z - x * y * z - 2.0, x, y, z};
}

Complex Character::residual() const { return vertex_residual(x, y, z, kappa); }

Complex vertex_residual(Complex x, Complex y, Complex z, Complex kappa) {
  return x * x + y * y + z * z - x * y * z - 2.0 - kappa;
}

double relative_vertex_residual(Complex x, Complex y, Complex z, Complex kappa) {
  const double scale = std::norm(x) + std::norm(y) + std::norm(z) + std::abs(x * y * z);
  return std::abs(vertex_residual(x, y, z, kappa)) / std::max(1.0, scale);
}

TraceMap::TraceMap(Character c) : c_(c) {
  for (Complex v : {c.x, c.y, c.z, c.kappa}) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw InvalidArgument("character has a non-finite entry");
    }
  }
  memo_.emplace(canonical_slope(0, 1), c.x);
  memo_.emplace(Slope::infinity(), c.y);
  memo_.emplace(canonical_slope(1, 1), c.z);
  memo_.emplace(canonical_slope(-1, 1), c.x * c.y - c.z);
  max_residual_ = relative_vertex_residual(c.x, c.y, c.z, c.kappa);
}

Complex TraceMap::trace_of(const Slope& s) const {
  {
    std::shared_lock lock(mu_);
    auto it = memo_.find(s);
    if (it != memo_.end()) return it->second;
  }
  // Same walk as trace_by_descent, recording every mediant on the way.
  std::vector<std::pair<Slope, Complex>> visited;
  double worst = 0;
  std::int64_t lp, lq, rp, rq;
  Complex vl, vr, vprev;
  if (s.p() > 0) {
    lp = 0, lq = 1, rp = 1, rq = 0;
    vl = c_.x, vr = c_.y, vprev = c_.x * c_.y - c_.z;
  } else {
    lp = -1, lq = 0, rp = 0, rq = 1;
    vl = c_.y, vr = c_.x, vprev = c_.z;
  }
  Complex result;
  for (;;) {
    const std::int64_t mp = lp + rp, mq = lq + rq;
    const Slope m = canonical_slope(mp, mq);
    Complex vm;
    {
      std::shared_lock lock(mu_);
      auto it = memo_.find(m);
      vm = it != memo_.end() ? it->second : vl * vr - vprev;
    }
    worst = std::max(worst, relative_vertex_residual(vl, vr, vm, c_.kappa));
    visited.emplace_back(m, vm);
    if (m == s) {
      result = vm;
      break;
    }
    const __int128 lhs = static_cast<__int128>(s.p()) * mq;
    const __int128 rhs = static_cast<__int128>(mp) * s.q();
    if (lhs < rhs) {
      vprev = vr;
      vr = vm;
      rp = mp, rq = mq;
    } else {
      vprev = vl;
      vl = vm;
      lp = mp, lq = mq;
    }
  }
  if (!std::isfinite(result.real()) || !std::isfinite(result.imag())) {
    throw OverflowError("trace of " + s.to_string() + " overflows double precision");
  }
  std::unique_lock lock(mu_);
  max_residual_ = std::max(max_residual_, worst);
  if (worst > kResidualLimit) {
    throw InvalidArgument("vertex relation drifted to " + std::to_string(worst) +
                          " on the path to " + s.to_string());
  }
  for (const auto& [slope, value] : visited) memo_.emplace(slope, value);
  return result;
}

double TraceMap::max_relative_residual() const {
  std::shared_lock lock(mu_);
  return max_residual_;
}

std::size_t TraceMap::memo_size() const {
  std::shared_lock lock(mu_);
  return memo_.size();
}

void TraceMap::insert(const Slope& s, Complex value) const {
  std::unique_lock lock(mu_);
  auto [it, fresh] = memo_.emplace(s, value);
  if (!fresh && std::abs(it->second - value) > 1e-9 * std::max(1.0, std::abs(value))) {
    throw InvalidArgument("conflicting trace for " + s.to_string());
  }
}

std::vector<std::pair<Slope, Complex>> TraceMap::memo_snapshot() const {
  std::shared_lock lock(mu_);
  std::vector<std::pair<Slope, Complex>> out(memo_.begin(), memo_.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return canonical_order_less(a.first, b.first);
  });
  return out;
}

Rational ExactCharacter::kappa() const { return x * x + y * y + z * z - x * y * z - 2; }

Rational exact_trace(const ExactCharacter& c, const Slope& s) {
  return trace_by_descent<Rational>(c.x, c.y, c.z, s);
}

Character character_from_matrices(const MatrixRep& m) {
  for (const Mat2* a : {&m.ax, &m.ay}) {
    const double scale = std::max(1.0, a->cwiseAbs2().sum());
    if (std::abs(a->determinant() - 1.0) > 1e-12 * scale) {
      throw InvalidArgument("matrix determinant is " + format_complex(a->determinant()) +
                            ", expected 1");
    }
  }
  const Mat2 xy = m.ax * m.ay;
  const Mat2 comm = xy * m.ax.inverse() * m.ay.inverse();
  return {comm.trace(), m.ax.trace(), m.ay.trace(), xy.trace()};
}

MatrixRep matrices_from_character(const Character& c) {
  const Complex b = c.x * c.y - c.z;
  const Complex root = std::sqrt(b * b - 4.0);
  Complex s1 = (b + root) / 2.0, s2 = (b - root) / 2.0;
  if (std::abs(s2) > std::abs(s1) ||
      (std::abs(s2) == std::abs(s1) && s2.imag() > s1.imag())) {
    std::swap(s1, s2);
  }
  const Complex s = s1;
  if (!(std::abs(s) > 0) || !std::isfinite(s.real()) || !std::isfinite(s.imag())) {
    throw DegenerateCharacterError("no admissible root for the Fricke construction");
  }
  MatrixRep m;
  m.ax << c.x, 1.0, -1.0, 0.0;
  m.ay << c.y, s, -1.0 / s, 0.0;
  return m;
}

bool is_real_interval_trace(Complex t, bool closed) {
  if (std::abs(t.imag()) > 1e-12) return false;
  return closed ? std::abs(t.real()) <= 2 + 1e-12 : std::abs(t.real()) < 2 - 1e-12;
}

HalfLength half_length(Complex trace) {
  if (is_real_interval_trace(trace, true)) {
    throw EllipticTraceError("trace " + format_complex(trace) + " is not loxodromic");
  }
  return {acosh_pos(-trace / 2.0)};
}

Complex complex_length(Complex trace) { return 2.0 * half_length(trace).value; }

std::pair<MatrixRep, Character> pants_holonomy(Complex t1, Complex t2, Complex t3) {
  for (Complex t : {t1, t2, t3}) {
    if (t.imag() != 0 || !(t.real() < -2)) {
      throw InvalidArgument("pants boundary trace " + format_complex(t) +
                            " is not real and below -2");
    }
  }
  const Character c = Character::from_triple(t1, t2, t3);
  return {matrices_from_character(c), c};
}

}  // namespace mcshane
