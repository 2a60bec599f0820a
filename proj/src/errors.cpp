#include "bmikit/errors.hpp"

namespace bmikit {

AlignmentError::AlignmentError(std::size_t source_lines, std::size_t target_lines)
    : Error("alignment error: source has " + std::to_string(source_lines) +
            " lines, target has " + std::to_string(target_lines)),
      source_lines_(source_lines),
      target_lines_(target_lines) {}

ParseError::ParseError(std::size_t line, const std::string& what)
    : Error("parse error at line " + std::to_string(line) + ": " + what), line_(line) {}

EncodingError::EncodingError(std::size_t byte_offset)
    : Error("invalid UTF-8 at byte offset " + std::to_string(byte_offset)),
      byte_offset_(byte_offset) {}

DivergenceError::DivergenceError(std::size_t epoch)
    : Error("training diverged (non-finite parameters) in epoch " + std::to_string(epoch)),
      epoch_(epoch) {}

}  // namespace bmikit
