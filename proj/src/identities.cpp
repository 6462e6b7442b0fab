#include "mcshane/identities.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <thread>

#include "mcshane/compensated_sum.hpp"

namespace mcshane {

namespace {

using TermFn = std::function<Complex(const Slope&)>;

void check_pole(Complex d, const char* what) {
  if (!(std::abs(d) >= kPoleThreshold)) throw PoleError(std::string(what) + " vanishes");
}

std::vector<Complex> evaluate_terms(const std::vector<Slope>& slopes, const TermFn& term,
                                    int jobs) {
  std::vector<Complex> out(slopes.size());
  const std::size_t n = slopes.size();
  const std::size_t workers = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = term(slopes[i]);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) out[i] = term(slopes[i]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

void set_residuals(SumReport& r) {
  for (auto& p : r.partials) p.residual = r.target.distance(p.value);
  r.residual = r.partials.empty() ? r.target.distance(0.0) : r.partials.back().residual;
}

// Terms are reduced in the order of `slopes`, which must be canonical, with a
// checkpoint after the last slope of every combinatorial length.
SumReport accumulate(SumMode mode, const LogClass& target, const std::vector<Slope>& slopes,
                     const TermFn& term, int jobs) {
  const std::vector<Complex> terms = evaluate_terms(slopes, term, jobs);
  SumReport r;
  r.mode = mode;
  r.target = target;
  CompensatedComplexSum sum;
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    sum.add(terms[i]);
    const std::int64_t size = combinatorial_length(slopes[i]);
    if (i + 1 == slopes.size() || combinatorial_length(slopes[i + 1]) != size) {
      r.partials.push_back({size, sum.get(), 0, i + 1});
    }
  }
  r.terms_used = slopes.size();
  if (!slopes.empty()) {
    const std::int64_t last = combinatorial_length(slopes.back());
    for (std::size_t i = 0; i < slopes.size(); ++i) {
      if (combinatorial_length(slopes[i]) == last) {
        r.max_tail_term = std::max(r.max_tail_term, std::abs(terms[i]));
      }
    }
  }
  set_residuals(r);
  return r;
}

void choose_sign(SumReport& r) {
  const LogClass plus = r.target;
  const LogClass minus{-plus.value, plus.modulus};
  if (minus.distance(r.value()) < plus.distance(r.value())) {
    r.target = minus;
    r.target_sign = -1;
  } else {
    r.target_sign = 1;
  }
  set_residuals(r);
}

void require_bq(const BQVerdict& v, const std::string& what) {
  if (v.kind == VerdictKind::kAccepted) return;
  std::string msg = what + ": " + to_string(v.kind);
  if (v.kind == VerdictKind::kRejectedInterval) {
    msg += " at " + v.slope.to_string() + " (trace " + format_complex(v.trace) + ")";
  } else if (!v.note.empty()) {
    msg += " (" + v.note + ")";
  }
  throw BQFailure(msg, v.kind);
}

bool is_cusped(Complex kappa) { return std::abs(kappa + 2.0) <= 1e-9; }

std::vector<Slope> slopes_of_class(std::int64_t max_size, SlopeClass cls) {
  std::vector<Slope> out;
  for (const auto& s : enumerate_slopes(max_size)) {
    if (slope_class(s) == cls) out.push_back(s);
  }
  return out;
}

}  // namespace

LogClass nu_of(Complex kappa) { return {acosh_pos(-kappa / 2.0), Modulus::kTwoPiI}; }

Complex mcshane_term(Complex trace, const LogClass& nu) {
  const Complex l = 2.0 * half_length(trace).value;
  const Complex v = nu.value;
  Complex num, den;
  if (l.real() >= std::abs(v.real())) {
    num = std::exp(v - l) + 1.0;
    den = std::exp(-v - l) + 1.0;
  } else {
    num = std::exp(v) + std::exp(l);
    den = std::exp(-v) + std::exp(l);
  }
  check_pole(den, "e^-nu + e^l");
  check_pole(num, "e^nu + e^l");
  return std::log(num / den);
}

Complex cusped_term(Complex trace) {
  const Complex l = 2.0 * half_length(trace).value;
  if (l.real() > 0) {
    const Complex w = std::exp(-l);
    check_pole(1.0 + w, "1 + e^-l");
    return w / (1.0 + w);
  }
  const Complex d = 1.0 + std::exp(l);
  check_pole(d, "1 + e^l");
  return 1.0 / d;
}

EdgeWeight psi_edge(const TraceMap& tm, const DirectedEdge& e) {
  const Complex x = tm.trace_of(e.x), y = tm.trace_of(e.y), z = tm.trace_of(e.to);
  check_pole(x, "phi(X)");
  check_pole(y, "phi(Y)");
  const Complex kappa = tm.character().kappa;
  if (std::abs(kappa + 2.0) <= 1e-12) return {e, z / (x * y)};
  const Complex k2 = kappa + 2.0;
  const Complex sx = std::sqrt(1.0 - k2 / (x * x)), sy = std::sqrt(1.0 - k2 / (y * y));
  check_pole(sx, "x^2 - (kappa + 2)");
  check_pole(sy, "y^2 - (kappa + 2)");
  const Complex num = 1.0 + (std::exp(nu_of(kappa).value) - 1.0) * (z / (x * y));
  check_pole(num, "psi numerator");
  return {e, std::log(num / (sx * sy))};
}

Complex circular_psi_sum(const TraceMap& tm, const FiniteSubtree& t) {
  CompensatedComplexSum sum;
  for (const auto& e : circular_set(t)) sum.add(psi_edge(tm, e).value);
  return sum.get();
}

std::string to_string(SumMode m) {
  switch (m) {
    case SumMode::kBowditch:
      return "bowditch";
    case SumMode::kCusped:
      return "cusped";
    case SumMode::kPants:
      return "pants";
    case SumMode::kWeierstrass:
      return "weierstrass";
    case SumMode::kBundleFull:
      return "bundle-full";
    case SumMode::kBundleHalf:
      return "bundle-half";
    case SumMode::kBundleCuspedFull:
      return "bundle-cusped-full";
    case SumMode::kBundleCuspedHalf:
      return "bundle-cusped-half";
  }
  return "unknown";
}

SumReport sum_identity(const TraceMap& tm, SumMode mode, const SumOptions& opts) {
  if (opts.max_size < 1) throw InvalidArgument("max_size must be >= 1");
  const Character& c = tm.character();
  LogClass target;
  TermFn term;
  const LogClass nu = nu_of(c.kappa);
  switch (mode) {
    case SumMode::kBowditch:
      target = nu;
      term = [&](const Slope& s) { return mcshane_term(tm.trace_of(s), nu); };
      break;
    case SumMode::kPants:
      target = {nu.value, Modulus::kPiI};
      term = [&](const Slope& s) { return mcshane_term(tm.trace_of(s), nu); };
      break;
    case SumMode::kCusped:
      if (!is_cusped(c.kappa)) {
        throw InvalidArgument("cusped sum needs kappa = -2, got " + format_complex(c.kappa));
      }
      target = {0.5, Modulus::kNone};
      term = [&](const Slope& s) { return cusped_term(tm.trace_of(s)); };
      break;
    default:
      throw InvalidArgument("sum_identity does not handle mode " + to_string(mode));
  }
  if (!opts.force) {
    require_bq(check_bq(c, opts.bq_depth, BQVariant::kExtended), "BQ check");
  }
  SumReport r = accumulate(mode, target, enumerate_slopes(opts.max_size), term, opts.jobs);
  if (opts.force) r.note = "BQ precondition skipped";
  return r;
}

SumReport sum_identity(const Character& c, SumMode mode, const SumOptions& opts) {
  TraceMap tm(c);
  return sum_identity(tm, mode, opts);
}

SlopeClass slope_class(const Slope& s) {
  const bool p_odd = s.p() % 2 != 0, q_odd = s.q() % 2 != 0;
  if (p_odd && q_odd) return SlopeClass::k11;
  return p_odd ? SlopeClass::k10 : SlopeClass::k01;
}

std::string to_string(SlopeClass c) {
  switch (c) {
    case SlopeClass::k01:
      return "01";
    case SlopeClass::k10:
      return "10";
    case SlopeClass::k11:
      return "11";
  }
  return "??";
}

SlopeClass parse_slope_class(const std::string& text) {
  if (text == "01") return SlopeClass::k01;
  if (text == "10") return SlopeClass::k10;
  if (text == "11") return SlopeClass::k11;
  throw ParseError("slope class must be 01, 10 or 11, got '" + text + "'");
}

double symmetric_trace(double kappa) {
  if (!(kappa < 2)) throw InvalidArgument("symmetric triple needs kappa < 2");
  const auto f = [kappa](double t) { return t * t * t - 3 * t * t + 2 + kappa; };
  double lo = 2, hi = 4;
  while (f(hi) <= 0) hi *= 2;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = (lo + hi) / 2;
    (f(mid) > 0 ? hi : lo) = mid;
  }
  double t = (lo + hi) / 2;
  for (int i = 0; i < 3; ++i) {
    const double d = 3 * t * t - 6 * t;
    if (d != 0) t -= f(t) / d;
  }
  return t;
}

SumReport weierstrass_sum(const TraceMap& tm, SlopeClass cls, const SumOptions& opts) {
  if (opts.max_size < 1) throw InvalidArgument("max_size must be >= 1");
  const Character& c = tm.character();
  for (Complex v : {c.kappa, c.x, c.y, c.z}) {
    if (v.imag() != 0) throw InvalidArgument("Weierstrass sums need a real character");
  }
  if (!(c.kappa.real() <= 2)) throw InvalidArgument("Weierstrass sums need kappa <= 2");
  const double coeff = std::sqrt(2 - c.kappa.real()) / 2;
  const TermFn term = [&](const Slope& s) -> Complex {
    const Complex t = tm.trace_of(s);
    if (std::abs(t.imag()) > 1e-9 * std::max(1.0, std::abs(t))) {
      throw InvalidArgument("length of " + s.to_string() + " is not real");
    }
    if (!(std::abs(t.real()) > 2)) {
      throw EllipticTraceError("trace of " + s.to_string() + " is in [-2, 2]");
    }
    const double sinh_half = std::sqrt(t.real() * t.real() / 4 - 1);
    return std::atan(coeff / sinh_half);
  };
  if (!opts.force) {
    require_bq(check_bq(c, opts.bq_depth, BQVariant::kExtended), "BQ check");
  }
  SumReport r = accumulate(SumMode::kWeierstrass, {kPi / 2, Modulus::kNone},
                           slopes_of_class(opts.max_size, cls), term, opts.jobs);
  r.note = "class " + to_string(cls);
  if (opts.force) r.note += "; BQ precondition skipped";
  return r;
}

SumReport weierstrass_sum(const Character& c, SlopeClass cls, const SumOptions& opts) {
  TraceMap tm(c);
  return weierstrass_sum(tm, cls, opts);
}

SumReport weierstrass_sum(double param, WeierstrassKind kind, SlopeClass cls,
                          const SumOptions& opts) {
  double kappa;
  if (kind == WeierstrassKind::kCone) {
    if (!(param >= 0 && param < 2 * kPi)) throw InvalidArgument("cone angle must be in [0, 2 pi)");
    kappa = -2 * std::cos(param / 2);
  } else {
    if (!(param >= 0) || !std::isfinite(param)) {
      throw InvalidArgument("boundary length must be >= 0");
    }
    kappa = -2 * std::cosh(param / 2);
  }
  const double t = symmetric_trace(kappa);
  return weierstrass_sum(Character::from_triple(t, t, t), cls, opts);
}

Complex cusp_modulus(const MatrixRep& m, const Mat2& a) {
  const Mat2 k = m.ax * m.ay * m.ax.inverse() * m.ay.inverse();
  const Mat2 id = Mat2::Identity();
  const auto unipotent = [&](const Mat2& g, const char* what) -> Mat2 {
    const Complex tr = g.trace();
    const Mat2 h = tr.real() >= 0 ? g : Mat2(-g);
    if (std::abs(h.trace() - 2.0) > 1e-6 * std::max(1.0, h.norm())) {
      throw DegenerateCharacterError(std::string(what) + " is not parabolic");
    }
    return h - id;
  };
  const Mat2 np = unipotent(k, "commutator");
  const Mat2 nq = unipotent(a, "conjugator");
  const double scale = np.squaredNorm();
  if (!(scale > 1e-20)) throw DegenerateCharacterError("commutator is the identity");
  const Complex lambda = np.conjugate().cwiseProduct(nq).sum() / scale;
  if ((nq - lambda * np).norm() > 1e-6 * std::max(1.0, nq.norm())) {
    throw DegenerateCharacterError("conjugator and commutator are not parallel parabolics");
  }
  return lambda;
}

BundleSums bundle_sums(const TraceMap& tm, const MCGElement& theta, const SumOptions& opts,
                       bool cusped) {
  if (opts.max_size < 1) throw InvalidArgument("max_size must be >= 1");
  if (!theta.is_anosov()) throw InvalidArgument("bundle sums need an Anosov mapping class");
  const Character& c = tm.character();
  if (cusped && !is_cusped(c.kappa)) {
    throw InvalidArgument("cusped bundle sums need kappa = -2, got " + format_complex(c.kappa));
  }
  if (!opts.force) {
    require_bq(check_relative_bq(c, theta, opts.bq_depth), "relative BQ check");
  }
  const AnosovAxis axis = anosov_axis(theta);
  const std::vector<Slope> reps = orbit_representatives(axis, opts.max_size);
  std::vector<Slope> left;
  for (const auto& s : reps) {
    if (in_left_side(axis, s)) left.push_back(s);
  }
  const MatrixRep m = matrices_from_character(c);
  BundleSums out{{}, {}, conjugator_for(theta, m)};

  const LogClass nu = nu_of(c.kappa);
  TermFn term;
  if (cusped) {
    term = [&](const Slope& s) { return cusped_term(tm.trace_of(s)); };
  } else {
    term = [&](const Slope& s) { return mcshane_term(tm.trace_of(s), nu); };
  }
  const Modulus mod = cusped ? Modulus::kNone : Modulus::kTwoPiI;
  const LogClass half_target =
      cusped ? LogClass{cusp_modulus(m, out.conjugator.a), Modulus::kNone} : out.conjugator.l_a;
  out.full = accumulate(cusped ? SumMode::kBundleCuspedFull : SumMode::kBundleFull, {0.0, mod},
                        reps, term, opts.jobs);
  out.half = accumulate(cusped ? SumMode::kBundleCuspedHalf : SumMode::kBundleHalf, half_target,
                        left, term, opts.jobs);
  choose_sign(out.half);
  const std::string note = "theta " + theta.word() + (opts.force ? "; BQ precondition skipped" : "");
  out.full.note = note;
  out.half.note = note;
  return out;
}

BundleSums bundle_sums(const Character& c, const MCGElement& theta, const SumOptions& opts,
                       bool cusped) {
  TraceMap tm(c);
  return bundle_sums(tm, theta, opts, cusped);
}

}  // namespace mcshane
