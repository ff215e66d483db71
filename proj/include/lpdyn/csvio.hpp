#pragma once
#include <string>
#include <vector>

#include "lpdyn/bigint.hpp"

namespace lpdyn {

// RFC-4180-style quoting: the field is wrapped in double quotes when it
// contains a comma, a quote, or a newline, with embedded quotes doubled;
// anything else passes through untouched.
std::string csv_field(const std::string& text);

// Fields joined with commas (each quoted as needed), no trailing newline.
std::string csv_row(const std::vector<std::string>& fields);

// Shortest decimal that parses back to exactly the same double, so a rerun
// with the same configuration emits byte-identical output.
std::string format_double(double v);

// Fixed number of significant digits with trailing zeros kept, e.g.
// (0.3230659473, 12) -> "0.323065947300".
std::string format_significant(double v, int digits);

// Command-line system names additionally accept "rank2:3" for "rank2(3)";
// every other spelling passes through unchanged.
std::string canonical_system_name(const std::string& name);

// Parses "p" or "p/q" into an exact rational in lowest terms.  Throws Error
// on malformed text or a zero denominator.
Rat parse_rational_text(const std::string& text);

// Closed-form constants by name: smyth, mx4:r, mx5:r, cstar:M,
// rank2-entropy:r, markoff-x5, somos-x6.  Unknown names throw Error with a
// message listing the valid ones.
double closed_form_value(const std::string& name);
std::vector<std::string> closed_form_names();

} // namespace lpdyn
