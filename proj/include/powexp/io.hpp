#pragma once

#include <iosfwd>
#include <string>

#include "powexp/exp_sum.hpp"

namespace powexp::io {

/// JSON object {beta, t_lo, t_hi, provenance, terms: [{a, w}, ...]} with
/// numbers printed to 17 significant digits, so a write/read round trip is
/// bit-exact.
void write_exp_sum(std::ostream& out, const ExpSum& sum);
std::string exp_sum_to_json(const ExpSum& sum);

/// Parses and validates; malformed JSON or missing keys throw Error{Io},
/// invariant violations throw Error{InvalidSum}.
ExpSum read_exp_sum(std::istream& in);
ExpSum exp_sum_from_json(const std::string& text);

ExpSum load_exp_sum(const std::string& path);
void save_exp_sum(const std::string& path, const ExpSum& sum);

/// %.17g
std::string format_double(double v);

} // namespace powexp::io
