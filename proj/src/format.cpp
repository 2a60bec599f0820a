#include "bmikit/format.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace bmikit {

void append_fixed(std::string& out, double value, int digits) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed, digits);
  if (ec != std::errc()) throw std::runtime_error("value too large to format");
  std::string_view text(buf.data(), static_cast<std::size_t>(ptr - buf.data()));
  // "-0.000000" from tiny negatives or -0.0
  if (text.front() == '-' && text.find_first_not_of("-0.") == std::string_view::npos) text.remove_prefix(1);
  out.append(text);
}

std::string format_fixed(double value, int digits) {
  std::string out;
  append_fixed(out, value, digits);
  return out;
}

}  // namespace bmikit
