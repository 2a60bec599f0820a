#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bmikit {

// Base for every error raised by the toolkit. The CLI maps all of these to
// exit status 2 (data or validation failure).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters (schedules, metric settings, step sizes).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Source and target files disagree on line count.
class AlignmentError : public Error {
 public:
  AlignmentError(std::size_t source_lines, std::size_t target_lines);

  std::size_t source_lines() const { return source_lines_; }
  std::size_t target_lines() const { return target_lines_; }

 private:
  std::size_t source_lines_;
  std::size_t target_lines_;
};

// Malformed line in a corpus or stats file. Line numbers are 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what);

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class EncodingError : public Error {
 public:
  explicit EncodingError(std::size_t byte_offset);

  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

class VocabMismatchError : public Error {
 public:
  using Error::Error;
};

// Cross-entropy hit log(0) on a term with positive weight.
class InfiniteLossError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  explicit DivergenceError(std::size_t epoch);

  std::size_t epoch() const { return epoch_; }

 private:
  std::size_t epoch_;
};

// A diversity metric has no finite value for the given stream.
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

}  // namespace bmikit
