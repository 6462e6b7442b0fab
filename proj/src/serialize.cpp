#include "mcshane/serialize.hpp"

#include <cstdio>
#include <ostream>

#include "mcshane/errors.hpp"

namespace mcshane {

namespace {

Json dump_ready(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

Mat2 matrix_from_json(const Json& j, const char* name) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_array() || !j[1].is_array() ||
      j[0].size() != 2 || j[1].size() != 2) {
    throw ParseError(std::string("matrix ") + name + " must be [[a, b], [c, d]]");
  }
  Mat2 m;
  m << complex_from_json(j[0][0]), complex_from_json(j[0][1]), complex_from_json(j[1][0]),
      complex_from_json(j[1][1]);
  return m;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json complex_to_json(Complex z) { return Json::array({dump_ready(z.real()), dump_ready(z.imag())}); }

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_string()) return parse_complex(j.get<std::string>());
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ParseError("expected a complex number, got " + j.dump());
}

Json character_to_json(const Character& c) {
  return {{"kappa", complex_to_json(c.kappa)},
          {"x", complex_to_json(c.x)},
          {"y", complex_to_json(c.y)},
          {"z", complex_to_json(c.z)}};
}

Json matrices_to_json(const MatrixRep& m) {
  auto one = [](const Mat2& a) {
    return Json::array({Json::array({complex_to_json(a(0, 0)), complex_to_json(a(0, 1))}),
                        Json::array({complex_to_json(a(1, 0)), complex_to_json(a(1, 1))})});
  };
  return {{"ax", one(m.ax)}, {"ay", one(m.ay)}};
}

MatrixRep matrices_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("ax") || !j.contains("ay")) {
    throw ParseError("matrices need fields ax and ay");
  }
  return {matrix_from_json(j["ax"], "ax"), matrix_from_json(j["ay"], "ay")};
}

Character character_from_document(const Json& doc) {
  if (!doc.is_object()) throw ParseError("character document must be an object");
  Character c;
  if (doc.contains("matrices") || doc.contains("ax")) {
    c = character_from_matrices(matrices_from_json(doc.contains("ax") ? doc : doc["matrices"]));
    if (doc.contains("kappa")) {
      const Complex k = complex_from_json(doc["kappa"]);
      if (std::abs(k - c.kappa) > 1e-8 * std::max(1.0, std::abs(k))) {
        throw InvalidArgument("kappa " + format_complex(k) + " disagrees with the matrices (" +
                              format_complex(c.kappa) + ")");
      }
    }
    return c;
  }
  for (const char* key : {"kappa", "x", "y", "z"}) {
    if (!doc.contains(key)) throw ParseError(std::string("character document lacks '") + key + "'");
  }
  c = {complex_from_json(doc["kappa"]), complex_from_json(doc["x"]), complex_from_json(doc["y"]),
       complex_from_json(doc["z"])};
  if (relative_vertex_residual(c.x, c.y, c.z, c.kappa) > 1e-8) {
    throw InvalidArgument("vertex relation fails: residual " + format_complex(c.residual()));
  }
  return c;
}

Character parse_character_input(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed character document: ") + e.what());
  }
  return character_from_document(doc);
}

Json verdict_to_json(const BQVerdict& v) {
  Json j = {{"verdict", to_string(v.kind)},
            {"variant", v.variant == BQVariant::kClosed ? "closed" : "extended"},
            {"depth_reached", v.depth_reached},
            {"vertices_visited", v.vertices_visited},
            {"small_count", v.small_count},
            {"small_bound", v.small_bound},
            {"guard_violations", v.guard_violations}};
  if (v.kind == VerdictKind::kAccepted) {
    j["tree_vertices"] = v.tree.size();
    Json circ = Json::array();
    for (const auto& w : v.circular) {
      Json item = {{"edge", w.edge.to_string()}, {"method", w.method}};
      if (w.method == "fan") item["fan_n0"] = w.fan_n0;
      circ.push_back(item);
    }
    j["circular"] = circ;
  }
  if (v.kind == VerdictKind::kRejectedInterval) {
    j["slope"] = v.slope.to_string();
    j["trace"] = complex_to_json(v.trace);
  }
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

void write_report_lines(std::ostream& out, const SumReport& r, const std::string& series) {
  for (const auto& p : r.partials) {
    Json j;
    if (!series.empty()) j["series"] = series;
    j["depth"] = p.depth;
    j["partial_re"] = dump_ready(p.value.real());
    j["partial_im"] = dump_ready(p.value.imag());
    j["residual"] = dump_ready(p.residual);
    j["terms_used"] = p.terms_used;
    out << j.dump() << '\n';
  }
}

void write_report_csv(std::ostream& out, const SumReport& r) {
  out << kCsvHeader << '\n';
  for (const auto& p : r.partials) {
    out << p.depth << ',' << format_double(p.value.real()) << ',' << format_double(p.value.imag())
        << ',' << format_double(p.residual) << ',' << p.terms_used << '\n';
  }
}

Json report_summary(const SumReport& r, double tol) {
  Json j = {{"summary", to_string(r.mode)},
            {"value", complex_to_json(r.value())},
            {"target", complex_to_json(r.target.value)},
            {"modulus", to_string(r.target.modulus)},
            {"residual", dump_ready(r.residual)},
            {"terms_used", r.terms_used},
            {"max_tail_term", dump_ready(r.max_tail_term)},
            {"tol", tol},
            {"converged", r.residual <= tol}};
  if (r.target_sign != 0) j["target_sign"] = r.target_sign;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

}  // namespace mcshane
