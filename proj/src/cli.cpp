#include "mcshane/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include "mcshane/cache.hpp"
#include "mcshane/errors.hpp"
#include "mcshane/identities.hpp"
#include "mcshane/serialize.hpp"

namespace mcshane::cli {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

std::array<Complex, 3> parse_triple(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) throw ParseError("--triple needs three comma-separated values");
  return {parse_complex(parts[0]), parse_complex(parts[1]), parse_complex(parts[2])};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Modulus parse_modulus(const std::string& text) {
  if (text == "2pi") return Modulus::kTwoPiI;
  if (text == "pi") return Modulus::kPiI;
  if (text == "none") return Modulus::kNone;
  throw ParseError("--mode for sums must be 2pi, pi or none, got '" + text + "'");
}

int exit_for(VerdictKind k) {
  switch (k) {
    case VerdictKind::kAccepted:
      return kExitOk;
    case VerdictKind::kRejectedInterval:
    case VerdictKind::kRejectedInfinitelyMany:
      return kExitRejected;
    case VerdictKind::kUndetermined:
      return kExitUndetermined;
  }
  return kExitUndetermined;
}

bool wants_bundle(const RunConfig& cfg) {
  return cfg.command == "sum" && (cfg.sum_mode == "bundle" || cfg.sum_mode == "bundle-cusped");
}

// The first theta-fixed character with the given kappa that passes the
// relative BQ check.
std::optional<Character> fixed_character(const RunConfig& cfg, std::ostream& err) {
  const MCGElement theta = MCGElement::from_word(cfg.theta);
  for (const auto& c : fixed_characters_of(theta, *cfg.kappa)) {
    try {
      if (check_relative_bq(c, theta, cfg.depth).kind == VerdictKind::kAccepted) return c;
    } catch (const Error&) {
    }
  }
  err << "error: no fixed character of " << theta.word() << " at kappa "
      << format_complex(*cfg.kappa) << " passes the relative BQ check\n";
  return std::nullopt;
}

// Resolves the character source; nullopt when the command does not need one
// and none was given.
std::optional<Character> resolve_character(const RunConfig& cfg, std::ostream& err,
                                           bool& failed) {
  failed = false;
  if (cfg.matrices_file && cfg.triple) {
    throw InvalidArgument("give either --triple or --matrices, not both");
  }
  if (cfg.matrices_file) {
    Json doc;
    try {
      doc = Json::parse(read_file(*cfg.matrices_file));
    } catch (const Json::parse_error& e) {
      throw ParseError(std::string("malformed matrices file: ") + e.what());
    }
    if (cfg.kappa && !doc.contains("kappa")) doc["kappa"] = complex_to_json(*cfg.kappa);
    return character_from_document(doc);
  }
  if (cfg.triple) {
    const auto& t = *cfg.triple;
    Json doc = {{"x", complex_to_json(t[0])}, {"y", complex_to_json(t[1])},
                {"z", complex_to_json(t[2])}};
    const Character from = Character::from_triple(t[0], t[1], t[2]);
    doc["kappa"] = complex_to_json(cfg.kappa ? *cfg.kappa : from.kappa);
    return character_from_document(doc);
  }
  if (!cfg.kappa) return std::nullopt;
  if (!cfg.theta.empty() && (wants_bundle(cfg) || cfg.command == "bq-check")) {
    auto c = fixed_character(cfg, err);
    failed = !c;
    return c;
  }
  if (cfg.command == "sum" && cfg.sum_mode == "weierstrass") {
    if (cfg.kappa->imag() != 0) throw InvalidArgument("Weierstrass sums need a real kappa");
    const double t = symmetric_trace(cfg.kappa->real());
    return Character::from_triple(t, t, t);
  }
  throw InvalidArgument("--kappa alone does not determine a character here; add --triple");
}

void emit_report(const RunConfig& cfg, SumReport r, const std::string& series, std::ostream& out,
                 std::ostream& err, bool& converged) {
  if (!cfg.mode.empty()) {
    r.target.modulus = parse_modulus(cfg.mode);
    for (auto& p : r.partials) p.residual = r.target.distance(p.value);
    r.residual = r.partials.empty() ? r.target.distance(0.0) : r.partials.back().residual;
  }
  Json summary = report_summary(r, cfg.tol);
  if (!series.empty()) summary["series"] = series;
  if (cfg.csv) {
    write_report_csv(out, r);
    err << summary.dump() << '\n';
  } else {
    write_report_lines(out, r, series);
    out << summary.dump() << '\n';
  }
  converged = converged && r.residual <= cfg.tol;
}

int run_sum(const RunConfig& cfg, const TraceMap& tm, std::ostream& out, std::ostream& err) {
  SumOptions opts;
  opts.max_size = cfg.max_size;
  opts.bq_depth = cfg.depth;
  opts.force = cfg.force;
  opts.jobs = cfg.jobs;
  bool converged = true;
  const std::string& m = cfg.sum_mode;
  if (m == "bowditch" || m == "cusped" || m == "pants") {
    const SumMode mode =
        m == "bowditch" ? SumMode::kBowditch : (m == "cusped" ? SumMode::kCusped : SumMode::kPants);
    emit_report(cfg, sum_identity(tm, mode, opts), "", out, err, converged);
  } else if (m == "weierstrass") {
    std::vector<SlopeClass> classes = {SlopeClass::k01, SlopeClass::k10, SlopeClass::k11};
    if (!cfg.cls.empty()) classes = {parse_slope_class(cfg.cls)};
    for (auto cls : classes) {
      emit_report(cfg, weierstrass_sum(tm, cls, opts), classes.size() > 1 ? to_string(cls) : "",
                  out, err, converged);
    }
  } else {
    if (cfg.theta.empty()) throw InvalidArgument("bundle sums need --theta");
    const BundleSums b =
        bundle_sums(tm, MCGElement::from_word(cfg.theta), opts, m == "bundle-cusped");
    emit_report(cfg, b.full, "full", out, err, converged);
    emit_report(cfg, b.half, "half", out, err, converged);
  }
  return converged ? kExitOk : kExitUndetermined;
}

int run_bq(const RunConfig& cfg, const Character& c, std::ostream& out) {
  BQVerdict v;
  if (!cfg.theta.empty()) {
    v = check_relative_bq(c, MCGElement::from_word(cfg.theta), cfg.depth);
  } else {
    BQVariant variant = BQVariant::kClosed;
    if (cfg.mode == "extended") {
      variant = BQVariant::kExtended;
    } else if (!cfg.mode.empty() && cfg.mode != "closed") {
      throw ParseError("--mode for bq-check must be closed or extended");
    }
    v = check_bq(c, cfg.depth, variant);
  }
  Json j = verdict_to_json(v);
  j["character"] = character_to_json(c);
  if (!cfg.theta.empty()) j["theta"] = MCGElement::from_word(cfg.theta).word();
  out << j.dump() << '\n';
  return exit_for(v.kind);
}

void emit_slope(const RunConfig& cfg, const Slope& s, const TraceMap* tm, const char* side,
                std::ostream& out) {
  if (cfg.csv) {
    out << s.to_string() << ',' << combinatorial_length(s) << ',' << to_string(slope_class(s));
    if (side) out << ',' << side;
    if (tm) {
      const Complex t = tm->trace_of(s);
      out << ',' << format_double(t.real()) << ',' << format_double(t.imag());
    }
    out << '\n';
    return;
  }
  Json j = {{"slope", s.to_string()},
            {"size", combinatorial_length(s)},
            {"class", to_string(slope_class(s))}};
  if (side) j["side"] = side;
  if (tm) j["trace"] = complex_to_json(tm->trace_of(s));
  out << j.dump() << '\n';
}

void csv_header(const RunConfig& cfg, bool side, bool trace, std::ostream& out) {
  if (!cfg.csv) return;
  out << "slope,size,class" << (side ? ",side" : "") << (trace ? ",trace_re,trace_im" : "")
      << '\n';
}

int run_enumerate(const RunConfig& cfg, const TraceMap* tm, std::ostream& out) {
  csv_header(cfg, false, tm, out);
  for (const auto& s : enumerate_slopes(cfg.max_size)) emit_slope(cfg, s, tm, nullptr, out);
  return kExitOk;
}

int run_orbit(const RunConfig& cfg, const TraceMap* tm, std::ostream& out) {
  if (cfg.theta.empty()) throw InvalidArgument("orbit needs --theta");
  const MCGElement theta = MCGElement::from_word(cfg.theta);
  const AnosovAxis axis = anosov_axis(theta);
  if (!cfg.csv) {
    const auto& mat = theta.matrix();
    Json head = {{"theta", theta.word()},
                 {"matrix", mat},
                 {"repelling", axis.repelling.value()},
                 {"attracting", axis.attracting.value()},
                 {"axis_regions", axis.regions.size()},
                 {"branches", axis.branches.size()}};
    out << head.dump() << '\n';
  }
  csv_header(cfg, true, tm, out);
  for (const auto& s : orbit_representatives(axis, cfg.max_size)) {
    emit_slope(cfg, s, tm, in_left_side(axis, s) ? "L" : "R", out);
  }
  return kExitOk;
}

int run_gap(const RunConfig& cfg, std::ostream& out) {
  if (cfg.args.size() != 4) throw ParseError("gap needs a function (G or S) and three arguments");
  const std::string& f = cfg.args[0];
  const Complex x = parse_complex(cfg.args[1]), y = parse_complex(cfg.args[2]),
                z = parse_complex(cfg.args[3]);
  Json j = {{"function", f}};
  if (f == "G") {
    j["value"] = complex_to_json(gap_G(x, y, z));
    j["log_form"] = complex_to_json(gap_G_log(x, y, z));
  } else if (f == "S") {
    j["value"] = complex_to_json(gap_S(x, y, z));
    j["log_form"] = complex_to_json(gap_S_log(x, y, z));
  } else {
    throw ParseError("gap function must be G or S, got '" + f + "'");
  }
  out << j.dump() << '\n';
  return kExitOk;
}

}  // namespace

std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out) {
  RunConfig cfg;
  std::string kappa, triple, matrices;
  CLI::App app{"McShane-type identities for characters of the one-holed torus", "mcshane"};
  app.require_subcommand(1, 1);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--kappa", kappa, "boundary trace, a+bi");
    sub->add_option("--triple", triple, "traces x,y,z at (0/1, inf, 1/1)");
    sub->add_option("--matrices", matrices, "JSON file with ax and ay");
    sub->add_option("--theta", cfg.theta, "mapping class as a word in R, L, r, l");
    sub->add_option("--max-size", cfg.max_size, "largest |p| + q summed or listed")
        ->check(CLI::PositiveNumber);
    sub->add_option("--depth", cfg.depth, "BQ search depth")->check(CLI::PositiveNumber);
    sub->add_option("--tol", cfg.tol, "residual tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--mode", cfg.mode, "sum: 2pi|pi|none; bq-check: closed|extended");
    sub->add_option("--class", cfg.cls, "Weierstrass class 01, 10 or 11");
    sub->add_flag("--csv", cfg.csv, "CSV instead of line records");
    sub->add_option("--jobs", cfg.jobs, "worker threads for term evaluation")
        ->check(CLI::PositiveNumber);
    sub->add_option("--cache", cfg.cache_dir, "trace cache directory");
    sub->add_flag("--force", cfg.force, "skip the BQ precondition of sums");
  };
  common(app.add_subcommand("bq-check", "Bowditch Q-conditions (relative with --theta)"));
  auto* sum = app.add_subcommand("sum", "partial sums of an identity");
  sum->add_option("series", cfg.sum_mode, "bowditch, cusped, weierstrass, pants, bundle or bundle-cusped")
      ->required()
      ->check(CLI::IsMember(
          {"bowditch", "cusped", "weierstrass", "pants", "bundle", "bundle-cusped"}));
  common(sum);
  common(app.add_subcommand("orbit", "orbit representatives of <theta> on slopes"));
  common(app.add_subcommand("enumerate", "slopes up to a size"));
  auto* gap = app.add_subcommand("gap", "gap functions G and S");
  gap->add_option("args", cfg.args, "G|S x y z")->expected(4)->required();
  gap->allow_extras(false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::Error& e) {
    throw ParseError(e.what());
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (!kappa.empty()) cfg.kappa = parse_complex(kappa);
  if (!triple.empty()) cfg.triple = parse_triple(triple);
  if (!matrices.empty()) cfg.matrices_file = matrices;
  return cfg;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.command == "gap") return run_gap(cfg, out);
    if (cfg.depth < 1) throw InvalidArgument("--depth must be >= 1");
    if (!(cfg.tol > 0)) throw InvalidArgument("--tol must be > 0");
    bool failed = false;
    const std::optional<Character> c = resolve_character(cfg, err, failed);
    if (failed) return kExitRejected;
    if (!c && (cfg.command == "sum" || cfg.command == "bq-check")) {
      throw InvalidArgument("no character given: use --triple, --matrices or --kappa");
    }
    if (cfg.command == "bq-check") return run_bq(cfg, *c, out);

    std::unique_ptr<TraceMap> tm;
    std::optional<TraceCache> cache;
    if (c) {
      if (!cfg.cache_dir.empty()) cache.emplace(cfg.cache_dir);
      tm = cache ? cache->load(*c, err) : std::make_unique<TraceMap>(*c);
    }
    int code = kExitOk;
    if (cfg.command == "sum") {
      code = run_sum(cfg, *tm, out, err);
    } else if (cfg.command == "enumerate") {
      code = run_enumerate(cfg, tm.get(), out);
    } else if (cfg.command == "orbit") {
      code = run_orbit(cfg, tm.get(), out);
    } else {
      throw ParseError("unknown command '" + cfg.command + "'");
    }
    if (cache) cache->store(*tm, err);
    return code;
  } catch (const BQFailure& e) {
    err << "error: " << e.what() << '\n';
    return exit_for(e.kind());
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUndetermined;
  }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::optional<RunConfig> cfg;
  try {
    cfg = parse_args(argc, argv, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (!cfg) return kExitOk;
  return run(*cfg, out, err);
}

}  // namespace mcshane::cli
