#pragma once

#include <string>
#include <vector>

#include "nmep/core.hpp"

namespace nmep {

/// Shortest round-trip decimal representation (std::to_chars).
std::string format_double(double x);

/// Parse a complex literal of the form "re", "re+imj" or "re-imj",
/// e.g. "1.5-0.25j". Throws ParseError.
cplx parse_complex(const std::string& text);

std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);

} // namespace nmep
