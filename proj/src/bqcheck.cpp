#include "mcshane/bqcheck.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>
#include <unordered_map>

#include "mcshane/errors.hpp"

namespace mcshane {

namespace {

constexpr std::size_t kNodeCap = 2000000;

using ValueMap = std::unordered_map<Slope, Complex, SlopeHash>;

bool strict_escape(Complex x, Complex y, Complex z, Complex zn) {
  return std::abs(x) > 2 && std::abs(y) > 2 && std::abs(zn) > std::abs(z);
}

std::size_t guard_violation(Complex x, Complex y, Complex z) {
  const double ax = std::abs(x), ay = std::abs(y), az = std::abs(z);
  int outward = 0;
  outward += std::abs(x * y - z) < az;
  outward += std::abs(x * z - y) < ay;
  outward += std::abs(y * z - x) < ax;
  return outward >= 2 && std::min({ax, ay, az}) > 2 ? 1 : 0;
}

class Search {
 public:
  Search(ValueMap values, BQVariant variant, int max_depth)
      : values_(std::move(values)), variant_(variant), max_depth_(max_depth) {
    verdict_.variant = variant;
    verdict_.small_bound = 3 * static_cast<std::size_t>(max_depth);
  }

  // Registers a region value; returns false if the search is over.
  bool note_region(const Slope& s, Complex v) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      finish_undetermined("non-finite trace at " + s.to_string());
      return false;
    }
    if (is_real_interval_trace(v, variant_ == BQVariant::kClosed)) {
      verdict_.kind = VerdictKind::kRejectedInterval;
      verdict_.slope = s;
      verdict_.trace = v;
      done_ = true;
      return false;
    }
    if (std::abs(v) <= 2 && small_.insert(s).second) {
      verdict_.small_count = small_.size();
      if (small_.size() > verdict_.small_bound) {
        verdict_.kind = VerdictKind::kRejectedInfinitelyMany;
        verdict_.note = "more than " + std::to_string(verdict_.small_bound) +
                        " slopes with |trace| <= 2 and no attractor";
        done_ = true;
        return false;
      }
    }
    return true;
  }

  void add_vertex(const FareyTriple& v) {
    tree_vertices_.push_back(v);
    ++verdict_.vertices_visited;
    verdict_.guard_violations +=
        guard_violation(values_.at(v.a), values_.at(v.b), values_.at(v.c));
  }

  BQVerdict run(const std::vector<DirectedEdge>& outward) {
    std::deque<std::pair<DirectedEdge, int>> queue;
    for (const auto& e : outward) queue.emplace_back(e, 0);
    bool exhausted = false;
    while (!queue.empty() && !done_) {
      const auto [e, depth] = queue.front();
      queue.pop_front();
      verdict_.depth_reached = std::max(verdict_.depth_reached, depth);
      const Complex x = values_.at(e.x), y = values_.at(e.y), z = values_.at(e.from);
      auto it = values_.find(e.to);
      if (it == values_.end()) {
        const Complex zn = x * y - z;
        it = values_.emplace(e.to, zn).first;
        if (!note_region(e.to, zn)) break;
      }
      const Complex zn = it->second;
      if (strict_escape(x, y, z, zn)) {
        circular_.push_back({e.reversed(), "escape", 0});
        continue;
      }
      const bool small_x = std::abs(x) <= 2, small_y = std::abs(y) <= 2;
      if (small_x != small_y) {
        const FanWitness fan = small_x ? fan_escape(x, y, zn) : fan_escape(y, x, zn);
        if (fan.ok) {
          circular_.push_back({e.reversed(), "fan", fan.n0});
          continue;
        }
      }
      if (depth + 1 > max_depth_ || verdict_.vertices_visited >= kNodeCap) {
        exhausted = true;
        continue;
      }
      add_vertex(e.head_vertex());
      const auto [a, b] = expand_edge(e);
      queue.emplace_back(a, depth + 1);
      queue.emplace_back(b, depth + 1);
    }
    if (done_) return verdict_;
    if (exhausted) {
      finish_undetermined(verdict_.vertices_visited >= kNodeCap ? "node cap reached"
                                                                : "depth budget exhausted");
      return verdict_;
    }
    verdict_.kind = VerdictKind::kAccepted;
    verdict_.tree = FiniteSubtree(tree_vertices_);
    verdict_.circular = circular_;
    return verdict_;
  }

  void finish_undetermined(const std::string& why) {
    verdict_.kind = VerdictKind::kUndetermined;
    verdict_.note = why;
    done_ = true;
  }

  const ValueMap& values() const { return values_; }
  BQVerdict& verdict() { return verdict_; }

 private:
  ValueMap values_;
  BQVariant variant_;
  int max_depth_;
  BQVerdict verdict_;
  std::set<Slope> small_;
  std::vector<FareyTriple> tree_vertices_;
  std::vector<CircularWitness> circular_;
  bool done_ = false;
};

}  // namespace

std::string to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::kAccepted:
      return "Accepted";
    case VerdictKind::kRejectedInterval:
      return "RejectedInterval";
    case VerdictKind::kRejectedInfinitelyMany:
      return "RejectedInfinitelyMany";
    case VerdictKind::kUndetermined:
      return "Undetermined";
  }
  return "Unknown";
}

FlowEdge flow_direction(const TraceMap& tm, const Slope& x, const Slope& y) {
  const auto [u, v] = apexes(x, y);
  const double au = std::abs(tm.trace_of(u)), av = std::abs(tm.trace_of(v));
  if (au > av) return {{x, y, u, v}, false};
  if (av > au) return {{x, y, v, u}, false};
  const Slope to = canonical_order_less(u, v) ? u : v;
  return {{x, y, other_apex(x, y, to), to}, true};
}

bool escape_criterion(const TraceMap& tm, const DirectedEdge& e) {
  const double ax = std::abs(tm.trace_of(e.x)), ay = std::abs(tm.trace_of(e.y));
  return ax > 2 && ay > 2 && std::abs(tm.trace_of(e.to)) >= std::abs(tm.trace_of(e.from));
}

FanWitness fan_escape(Complex x, Complex y0, Complex y1) {
  if (is_real_interval_trace(x, true) || !(std::abs(y0) > 2)) return {};
  const Complex root = std::sqrt(x * x - 4.0);
  Complex lambda = (x + root) / 2.0;
  if (std::abs(lambda) < 1) lambda = (x - root) / 2.0;
  const double mod = std::abs(lambda);
  if (!(mod > 1 + 1e-12)) return {};
  const Complex a = (y1 - y0 / lambda) / (lambda - 1.0 / lambda);
  const Complex b = y0 - a;
  if (!(std::abs(a) > 0)) return {};
  Complex prev = y0, cur = y1;
  double grow = mod;
  for (int n = 1; n <= 200; ++n, grow *= mod) {
    if (!(std::abs(cur) > 2)) return {};
    if (std::abs(a) * grow - std::abs(b) / grow > 2) return {true, n};
    const Complex next = x * cur - prev;
    prev = cur;
    cur = next;
  }
  return {};
}

BQVerdict check_bq(const Character& c, int max_depth, BQVariant variant) {
  if (max_depth < 1) throw InvalidArgument("max_depth must be >= 1");
  const FareyTriple base = base_triple();
  ValueMap values{{base.a, c.x}, {base.b, c.y}, {base.c, c.z}};
  Search search(values, variant, max_depth);
  for (const Slope& s : {base.a, base.b, base.c}) {
    if (!search.note_region(s, values.at(s))) return search.verdict();
  }
  search.add_vertex(base);
  std::vector<DirectedEdge> outward;
  for (const auto& e : edges_into(base)) outward.push_back(e.reversed());
  return search.run(outward);
}

BQVerdict check_relative_bq(const Character& c, const MCGElement& theta, int max_depth) {
  if (max_depth < 1) throw InvalidArgument("max_depth must be >= 1");
  if (!theta.is_anosov()) throw InvalidArgument("relative BQ needs an Anosov mapping class");
  const double drift = fixedness_residual(theta, c);
  if (drift > 1e-8) {
    throw InvalidArgument("character is not fixed by " + theta.word() + " (residual " +
                          std::to_string(drift) + ")");
  }
  const AnosovAxis axis = anosov_axis(theta);
  TraceMap tm(c);
  ValueMap values;
  std::vector<Slope> axis_slopes;
  for (const auto& e : axis.crossed) {
    for (const Slope& s : {e.x, e.y, e.from, e.to}) axis_slopes.push_back(s);
  }
  for (const auto& b : axis.branches) {
    for (const Slope& s : {b.x, b.y, b.from}) axis_slopes.push_back(s);
  }
  for (const auto& s : axis_slopes) values.emplace(s, tm.trace_of(s));

  Search search(values, BQVariant::kClosed, max_depth);
  // Only one representative per orbit counts towards the small-value bound.
  for (const auto& s : axis.regions) {
    if (!search.note_region(s, values.at(s))) return search.verdict();
  }
  for (const auto& b : axis.branches) search.add_vertex(b.tail_vertex());
  return search.run(axis.branches);
}

SublevelSet sublevel_set(const TraceMap& tm, double k, int max_depth) {
  if (k < 2) throw InvalidArgument("sublevel_set needs K >= 2");
  const FareyTriple base = base_triple();
  std::set<Slope> found;
  for (const Slope& s : {base.a, base.b, base.c}) {
    if (std::abs(tm.trace_of(s)) <= k) found.insert(s);
  }
  std::vector<std::pair<DirectedEdge, int>> stack;
  for (const auto& e : edges_into(base)) stack.emplace_back(e.reversed(), 1);
  std::size_t visited = 0;
  while (!stack.empty() && visited < kNodeCap) {
    const auto [e, depth] = stack.back();
    stack.pop_back();
    ++visited;
    const Complex x = tm.trace_of(e.x), y = tm.trace_of(e.y);
    const Complex z = tm.trace_of(e.from), zn = tm.trace_of(e.to);
    if (strict_escape(x, y, z, zn) && std::min(std::abs(x), std::abs(y)) > k) continue;
    if (std::abs(zn) <= k) found.insert(e.to);
    if (depth >= max_depth) continue;
    const auto [a, b] = expand_edge(e);
    stack.emplace_back(a, depth + 1);
    stack.emplace_back(b, depth + 1);
  }

  SublevelSet out;
  out.slopes.assign(found.begin(), found.end());
  std::sort(out.slopes.begin(), out.slopes.end(), canonical_order_less);
  const std::size_t n = out.slopes.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (are_farey_neighbors(out.slopes[i], out.slopes[j])) parent[root(i)] = root(j);
    }
  }
  std::set<std::size_t> roots;
  for (std::size_t i = 0; i < n; ++i) roots.insert(root(i));
  out.connected = roots.size() <= 1;
  return out;
}

double fibonacci_growth_constant(const TraceMap& tm, const FiniteSubtree& tree,
                                 std::int64_t max_size) {
  std::set<Slope> inside;
  for (const auto& v : tree.vertices()) inside.insert({v.a, v.b, v.c});
  double k = INFINITY;
  for (const auto& s : enumerate_slopes(max_size)) {
    if (inside.count(s)) continue;
    const double logp = std::max(0.0, std::log(std::abs(tm.trace_of(s))));
    k = std::min(k, logp / static_cast<double>(combinatorial_length(s)));
  }
  return k;
}

}  // namespace mcshane
