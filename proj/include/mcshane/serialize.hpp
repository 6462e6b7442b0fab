#pragma once

// Structured records for characters, matrices, verdicts and sum reports.
//
// Complex numbers are written as [re, im]. On input a complex may also be a
// plain number or an "a+bi" string.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "mcshane/bqcheck.hpp"
#include "mcshane/charvariety.hpp"
#include "mcshane/identities.hpp"

namespace mcshane {

using Json = nlohmann::ordered_json;

Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j);

Json character_to_json(const Character& c);
Json matrices_to_json(const MatrixRep& m);
MatrixRep matrices_from_json(const Json& j);

// Accepts {"kappa", "x", "y", "z"}, or {"matrices": {"ax", "ay"}} or a bare
// {"ax", "ay"}, each with an optional "kappa". Throws ParseError on malformed
// documents and InvalidArgument if the vertex relation fails by more than
// 1e-8 (relative).
Character parse_character_input(const std::string& text);
Character character_from_document(const Json& doc);

Json verdict_to_json(const BQVerdict& v);

inline constexpr const char* kCsvHeader = "depth,partial_re,partial_im,residual,terms_used";

// One record per depth checkpoint; `series` is added when non-empty.
void write_report_lines(std::ostream& out, const SumReport& r, const std::string& series = "");
void write_report_csv(std::ostream& out, const SumReport& r);
Json report_summary(const SumReport& r, double tol);

std::string format_double(double v);

}  // namespace mcshane
