#pragma once

#include <string>

namespace bmikit {

// Fixed-point decimal with `digits` places, locale-independent and
// correctly rounded. Negative zero prints as zero.
void append_fixed(std::string& out, double value, int digits = 6);
std::string format_fixed(double value, int digits = 6);

}  // namespace bmikit
