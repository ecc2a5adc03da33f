#pragma once

#include <string>

namespace likeability {

/// Shortest decimal that parses back to exactly `value` ('.' separator,
/// locale independent).
std::string format_double(double value);

/// Strict locale-independent parse of a whole field; surrounding spaces are
/// allowed. Returns false on anything else, including NaN/Inf spellings.
bool parse_double(const std::string& text, double& out);

}  // namespace likeability
