#include "mcshane/mcg.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mcshane/errors.hpp"

namespace mcshane {

namespace {

using IntMat = std::array<std::int64_t, 4>;

IntMat mul(const IntMat& m, const IntMat& n) {
  auto dot = [](std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
    std::int64_t x = 0, y = 0, r = 0;
    if (__builtin_mul_overflow(a, b, &x) || __builtin_mul_overflow(c, d, &y) ||
        __builtin_add_overflow(x, y, &r)) {
      throw OverflowError("mapping class matrix overflow");
    }
    return r;
  };
  return {dot(m[0], n[0], m[1], n[2]), dot(m[0], n[1], m[1], n[3]), dot(m[2], n[0], m[3], n[2]),
          dot(m[2], n[1], m[3], n[3])};
}

IntMat letter_matrix(char c) {
  switch (c) {
    case 'R':
      return {1, 1, 0, 1};
    case 'r':
      return {1, -1, 0, 1};
    case 'L':
      return {1, 0, 1, 1};
    case 'l':
      return {1, 0, -1, 1};
  }
  throw ParseError(std::string("unknown mapping class letter '") + c + "'");
}

char invert_letter(char c) { return std::islower(c) ? std::toupper(c) : std::tolower(c); }

// Image of a single generator (1 = X, 2 = Y) under one letter.
FreeWord letter_image(char c, int g) {
  switch (c) {
    case 'R':
      return g == 1 ? FreeWord{1, 2} : FreeWord{2};
    case 'r':
      return g == 1 ? FreeWord{1, -2} : FreeWord{2};
    case 'L':
      return g == 1 ? FreeWord{1} : FreeWord{2, 1};
    case 'l':
      return g == 1 ? FreeWord{1} : FreeWord{2, -1};
  }
  return {g};
}

FreeWord substitute(char c, const FreeWord& w) {
  FreeWord out;
  for (int g : w) {
    FreeWord img = letter_image(c, std::abs(g));
    if (g < 0) img = free_inverse(img);
    out.insert(out.end(), img.begin(), img.end());
  }
  return free_reduce(out);
}

// Value and gradient with respect to (x, y, z); holomorphic, so complex
// derivatives are exact.
struct Dual {
  Complex v{};
  std::array<Complex, 3> g{};

  friend Dual operator+(const Dual& a, const Dual& b) {
    Dual r{a.v + b.v, {}};
    for (int i = 0; i < 3; ++i) r.g[i] = a.g[i] + b.g[i];
    return r;
  }
  friend Dual operator-(const Dual& a, const Dual& b) {
    Dual r{a.v - b.v, {}};
    for (int i = 0; i < 3; ++i) r.g[i] = a.g[i] - b.g[i];
    return r;
  }
  friend Dual operator*(const Dual& a, const Dual& b) {
    Dual r{a.v * b.v, {}};
    for (int i = 0; i < 3; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
    return r;
  }
};

struct System {
  Eigen::Vector4cd f;
  Eigen::Matrix<Complex, 4, 3> j;
};

System evaluate_system(const std::array<Slope, 3>& pulled, Complex kappa,
                       const Eigen::Vector3cd& u) {
  Dual x{u[0], {1.0, 0.0, 0.0}}, y{u[1], {0.0, 1.0, 0.0}}, z{u[2], {0.0, 0.0, 1.0}};
  const Dual two{2.0 + kappa, {}};
  std::array<Dual, 4> rows{trace_by_descent(x, y, z, pulled[0]) - x,
                           trace_by_descent(x, y, z, pulled[1]) - y,
                           trace_by_descent(x, y, z, pulled[2]) - z,
                           x * x + y * y + z * z - x * y * z - two};
  System s;
  for (int r = 0; r < 4; ++r) {
    s.f[r] = rows[r].v;
    for (int c = 0; c < 3; ++c) s.j(r, c) = rows[r].g[c];
  }
  return s;
}

bool finite(const Eigen::Vector3cd& u) {
  for (int i = 0; i < 3; ++i) {
    if (!std::isfinite(u[i].real()) || !std::isfinite(u[i].imag())) return false;
  }
  return true;
}

}  // namespace

MCGElement MCGElement::from_word(const std::string& word) {
  MCGElement e;
  for (char c : word) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == 'I') continue;
    e.m_ = mul(e.m_, letter_matrix(c));
    e.word_.push_back(c);
  }
  return e;
}

MCGElement MCGElement::inverse() const {
  MCGElement e;
  for (auto it = word_.rbegin(); it != word_.rend(); ++it) e.word_.push_back(invert_letter(*it));
  e.m_ = {m_[3], -m_[1], -m_[2], m_[0]};
  return e;
}

Slope mcg_act_on_slope(const MCGElement& theta, const Slope& s) {
  const auto& m = theta.matrix();
  const __int128 p = static_cast<__int128>(m[0]) * s.p() + static_cast<__int128>(m[1]) * s.q();
  const __int128 q = static_cast<__int128>(m[2]) * s.p() + static_cast<__int128>(m[3]) * s.q();
  if (p > INT64_MAX || p < -INT64_MAX || q > INT64_MAX || q < -INT64_MAX) {
    throw OverflowError("slope image out of range");
  }
  return canonical_slope(static_cast<std::int64_t>(p), static_cast<std::int64_t>(q));
}

Character mcg_act_on_character(const MCGElement& theta, const Character& c) {
  const MCGElement inv = theta.inverse();
  const auto base = base_triple();
  Character out = c;
  out.x = trace_by_descent(c.x, c.y, c.z, mcg_act_on_slope(inv, base.a));
  out.y = trace_by_descent(c.x, c.y, c.z, mcg_act_on_slope(inv, base.b));
  out.z = trace_by_descent(c.x, c.y, c.z, mcg_act_on_slope(inv, base.c));
  return out;
}

double fixedness_residual(const MCGElement& theta, const Character& c) {
  const Character moved = mcg_act_on_character(theta, c);
  const double scale = std::max({1.0, std::abs(c.x), std::abs(c.y), std::abs(c.z)});
  return std::max({std::abs(moved.x - c.x), std::abs(moved.y - c.y), std::abs(moved.z - c.z)}) /
         scale;
}

FreeWord free_reduce(const FreeWord& w) {
  FreeWord out;
  for (int g : w) {
    if (!out.empty() && out.back() == -g) {
      out.pop_back();
    } else {
      out.push_back(g);
    }
  }
  return out;
}

FreeWord free_inverse(const FreeWord& w) {
  FreeWord out(w.rbegin(), w.rend());
  for (int& g : out) g = -g;
  return out;
}

FreeWord apply_lift(const MCGElement& theta, const FreeWord& w) {
  FreeWord out = free_reduce(w);
  const std::string& word = theta.word();
  for (auto it = word.rbegin(); it != word.rend(); ++it) out = substitute(*it, out);
  return out;
}

Mat2 evaluate(const MatrixRep& m, const FreeWord& w) {
  Mat2 out = Mat2::Identity();
  const Mat2 xi = m.ax.inverse(), yi = m.ay.inverse();
  for (int g : w) {
    switch (g) {
      case 1:
        out = out * m.ax;
        break;
      case -1:
        out = out * xi;
        break;
      case 2:
        out = out * m.ay;
        break;
      case -2:
        out = out * yi;
        break;
      default:
        throw InvalidArgument("bad free-group letter");
    }
  }
  return out;
}

std::vector<Character> fixed_characters_of(const MCGElement& theta, Complex kappa,
                                           const FixedPointOptions& opts) {
  const MCGElement inv = theta.inverse();
  const auto base = base_triple();
  const std::array<Slope, 3> pulled{mcg_act_on_slope(inv, base.a), mcg_act_on_slope(inv, base.b),
                                    mcg_act_on_slope(inv, base.c)};
  std::mt19937_64 rng(opts.rng_seed);
  std::uniform_real_distribution<double> box(-opts.box, opts.box);

  std::vector<Character> found;
  for (int seed = 0; seed < opts.seeds; ++seed) {
    Eigen::Vector3cd u;
    for (int i = 0; i < 3; ++i) {
      const double re = box(rng);
      u[i] = Complex(re, box(rng));
    }
    System sys = evaluate_system(pulled, kappa, u);
    // Iterate until the step stalls rather than stopping at the tolerance:
    // at singular roots Newton is only linear and would otherwise stop far
    // from the root in x while |F| is already tiny.
    for (int it = 0; it < opts.iterations; ++it) {
      if (sys.f.norm() == 0) break;
      const Eigen::Vector3cd step = sys.j.completeOrthogonalDecomposition().solve(-sys.f);
      if (step.norm() < 1e-15 * (1 + u.norm())) break;
      double t = 1;
      bool moved = false;
      for (int half = 0; half < 30; ++half, t /= 2) {
        const Eigen::Vector3cd trial = u + t * step;
        if (!finite(trial) || trial.norm() > 1e6) continue;
        System next = evaluate_system(pulled, kappa, trial);
        if (next.f.norm() < sys.f.norm()) {
          u = trial;
          sys = next;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    if (sys.f.norm() >= opts.tolerance) continue;
    if (sys.f.cwiseAbs().maxCoeff() > 1e-9) continue;

    const bool duplicate = std::any_of(found.begin(), found.end(), [&](const Character& c) {
      return std::max({std::abs(c.x - u[0]), std::abs(c.y - u[1]), std::abs(c.z - u[2])}) <
             opts.coalesce;
    });
    if (!duplicate) found.push_back({kappa, u[0], u[1], u[2]});
  }
  auto key = [](const Character& c) {
    return std::array<double, 6>{c.x.real(), c.x.imag(), c.y.real(),
                                 c.y.imag(), c.z.real(), c.z.imag()};
  };
  std::sort(found.begin(), found.end(),
            [&](const Character& a, const Character& b) { return key(a) < key(b); });
  return found;
}

Conjugator conjugator_for(const MCGElement& theta, const MatrixRep& m) {
  const std::array<FreeWord, 2> gens{FreeWord{1}, FreeWord{2}};
  std::array<Mat2, 2> src, dst;
  for (int g = 0; g < 2; ++g) {
    src[g] = evaluate(m, gens[g]);
    dst[g] = evaluate(m, apply_lift(theta, gens[g]));
  }
  // Columns: C = E_j for the four matrix units; rows: entries of
  // C rho(g) - rho(lift(g)) C for g = X, Y.
  Eigen::Matrix<Complex, 8, 4> k;
  for (int j = 0; j < 4; ++j) {
    Mat2 e = Mat2::Zero();
    e(j / 2, j % 2) = 1.0;
    for (int g = 0; g < 2; ++g) {
      const Mat2 r = e * src[g] - dst[g] * e;
      for (int i = 0; i < 4; ++i) k(4 * g + i, j) = r(i / 2, i % 2);
    }
  }
  Eigen::JacobiSVD<Eigen::Matrix<Complex, 8, 4>> svd(k, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double top = std::max(sv[0], 1e-300);
  if (sv[3] / top > 1e-7) {
    throw InvalidArgument("conjugation system has no solution; character is not fixed");
  }
  if (sv[2] / top < 1e-7) {
    throw DegenerateCharacterError("conjugation system is rank deficient (reducible character)");
  }
  Mat2 c;
  for (int j = 0; j < 4; ++j) c(j / 2, j % 2) = svd.matrixV()(j, 3);
  const Complex det = c.determinant();
  if (std::abs(det) < 1e-14) throw DegenerateCharacterError("conjugator is singular");
  c /= std::sqrt(det);
  Mat2 a = c.inverse();
  const Complex tr = a.trace();
  if (tr.real() < 0 || (tr.real() == 0 && tr.imag() < 0)) a = -a;

  double residual = 0;
  const Mat2 ai = a.inverse();
  for (int g = 0; g < 2; ++g) {
    const Mat2 diff = a * dst[g] * ai - src[g];
    const double scale = std::max(1.0, src[g].cwiseAbs().maxCoeff());
    residual = std::max(residual, diff.cwiseAbs().maxCoeff() / scale);
  }
  if (residual > 1e-8) {
    throw InvalidArgument("conjugator residual " + std::to_string(residual) + " exceeds 1e-8");
  }
  return {a, {2.0 * acosh_pos(-a.trace() / 2.0), Modulus::kTwoPiI}, residual};
}

double QuadraticIrrational::value() const {
  return (static_cast<double>(a) + sign * std::sqrt(static_cast<double>(d))) /
         static_cast<double>(b);
}

int QuadraticIrrational::compare(const Slope& s) const {
  if (s.is_infinity()) return 1;
  // sign(s - mu) = sign(u - v sqrt(d)) with b > 0.
  const __int128 u = static_cast<__int128>(s.p()) * b - static_cast<__int128>(s.q()) * a;
  const __int128 v = static_cast<__int128>(sign) * s.q();
  const __int128 limit = static_cast<__int128>(1) << 60;
  if (u > limit || u < -limit || v > limit || v < -limit || d > (std::int64_t{1} << 40)) {
    throw OverflowError("quadratic irrational comparison out of range");
  }
  if (u >= 0 && v <= 0) return 1;
  if (u <= 0 && v >= 0) return -1;
  const __int128 diff = u * u - v * v * d;
  const int mag = (diff > 0) - (diff < 0);
  return u > 0 ? mag : -mag;
}

namespace {

bool irrational_in_arc(const QuadraticIrrational& mu, const Slope& lo, const Slope& hi) {
  if (compare_on_line(lo, hi) < 0) return mu.compare(lo) < 0 && mu.compare(hi) > 0;
  return mu.compare(lo) < 0 || mu.compare(hi) > 0;
}

Slope apex_in_arc(const Slope& lo, const Slope& hi) {
  const auto [s, d] = apexes(lo, hi);
  return in_open_arc(lo, hi, s) ? s : d;
}

bool same_pair(const Slope& a, const Slope& b, const Slope& c, const Slope& d) {
  return (a == c && b == d) || (a == d && b == c);
}

}  // namespace

AnosovAxis anosov_axis(const MCGElement& theta) {
  if (!theta.is_anosov()) {
    throw InvalidArgument("mapping class " + theta.word() + " is not Anosov");
  }
  const auto& m = theta.matrix();
  const std::int64_t tr = theta.trace();
  QuadraticIrrational plus{m[0] - m[3], 2 * m[2], tr * tr - 4, 1};
  if (plus.b < 0) {
    plus.a = -plus.a;
    plus.b = -plus.b;
    plus.sign = -1;
  }
  QuadraticIrrational minus = plus;
  minus.sign = -plus.sign;
  auto eigen_size = [&](const QuadraticIrrational& mu) {
    return std::abs(static_cast<double>(m[2]) * mu.value() + static_cast<double>(m[3]));
  };
  if (eigen_size(minus) > eigen_size(plus)) std::swap(plus, minus);

  AnosovAxis axis;
  axis.repelling = minus;
  axis.attracting = plus;

  // Descend from the edge (0/1, inf) until it separates the fixed points.
  Slope lo = canonical_slope(0, 1), hi = Slope::infinity();
  for (int guard = 0;; ++guard) {
    if (guard > 100000) throw OverflowError("axis search did not terminate");
    const bool p_in = irrational_in_arc(plus, lo, hi);
    const bool m_in = irrational_in_arc(minus, lo, hi);
    if (p_in != m_in) break;
    if (!p_in) std::swap(lo, hi);
    const Slope c = apex_in_arc(lo, hi);
    const bool p_left = irrational_in_arc(plus, lo, c);
    const bool m_left = irrational_in_arc(minus, lo, c);
    if (p_left && m_left) {
      hi = c;
    } else if (!p_left && !m_left) {
      lo = c;
    } else {
      hi = c;
      break;
    }
  }
  // Orient so that the attracting point lies on the arc from lo up to hi.
  if (!irrational_in_arc(plus, lo, hi)) std::swap(lo, hi);

  const Slope target_a = mcg_act_on_slope(theta, lo), target_b = mcg_act_on_slope(theta, hi);
  Slope behind = apex_in_arc(hi, lo);
  for (int guard = 0;; ++guard) {
    if (guard > 100000) throw OverflowError("axis period too long");
    if (guard > 0 && same_pair(lo, hi, target_a, target_b)) break;
    const Slope c = apex_in_arc(lo, hi);
    axis.crossed.push_back({lo, hi, behind, c});
    axis.regions.push_back(c);
    if (irrational_in_arc(plus, lo, c)) {
      axis.branches.push_back(make_edge(c, hi, lo));
      behind = hi;
      hi = c;
    } else {
      axis.branches.push_back(make_edge(lo, c, hi));
      behind = lo;
      lo = c;
    }
  }
  return axis;
}

bool in_left_side(const AnosovAxis& axis, const Slope& s) {
  const int to_rep = axis.repelling.compare(s);   // sign(s - mu_-)
  const int to_att = axis.attracting.compare(s);  // sign(s - mu_+)
  if (axis.repelling.value() < axis.attracting.value()) return to_rep > 0 && to_att < 0;
  return to_rep > 0 || to_att < 0;
}

std::vector<Slope> orbit_representatives(const AnosovAxis& axis, std::int64_t max_size) {
  std::vector<Slope> out(axis.regions.begin(), axis.regions.end());
  for (const auto& b : axis.branches) {
    visit_beyond(b, max_size, [&](const DirectedEdge& e) { out.push_back(e.to); });
  }
  std::sort(out.begin(), out.end(), canonical_order_less);
  return out;
}

}  // namespace mcshane
