#pragma once

#include <string>

#include <json.hpp>

namespace ins::detail {

// Fixed-point decimal with up to 9 fractional digits and at least one, never
// in exponent form: 0.7 -> "0.7", 1 -> "1.0", 1/3 -> "0.333333333".
std::string format_decimal(double value);

// Key-sorted JSON with format_decimal for floating-point values. indent < 0
// produces a single line.
// Floats as format_decimal unless `exact`, then shortest round-trip text.
std::string canonical_dump(const nlohmann::json& value, int indent = 2, bool exact = false);

}  // namespace ins::detail
