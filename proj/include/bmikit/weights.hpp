#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "bmikit/cooccur.hpp"
#include "bmikit/corpus.hpp"
#include "bmikit/scoring.hpp"

namespace bmikit {

// w = S * BMI + B, or 0 when BMI < threshold.
struct BmiSchedule {
  double scale = 0.15;
  double base = 0.8;
  double threshold = 0.4;
};

// w = A * exp(-T * count) + 1
struct ExponentialSchedule {
  double amplitude = 1.0;
  double decay = 1e-5;
};

// w = A * count^2 * exp(-T * count) + 1
struct ChiSquareSchedule {
  double amplitude = 1.0;
  double decay = 1e-5;
};

using WeightSchedule = std::variant<BmiSchedule, ExponentialSchedule, ChiSquareSchedule>;

// Throws ValidationError if the schedule could emit a negative weight or has
// non-positive scale/amplitude/decay.
void validate(const WeightSchedule& schedule);
std::string describe(const WeightSchedule& schedule);

double weight_bmi(double bmi, const BmiSchedule& schedule);
double weight_exponential(std::uint64_t count, const ExponentialSchedule& schedule);
double weight_chisquare(std::uint64_t count, const ChiSquareSchedule& schedule);

struct EmitOptions {
  unsigned threads = 0;
  ScoringOptions scoring;
};

struct EmitSummary {
  std::size_t pairs = 0;
  std::size_t tokens = 0;
  std::size_t zeroed = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// One line per sentence pair, in corpus order: the target-position weights,
// tab-separated, six decimals. Frequency schedules use the target-side
// document frequency f_tgt as Count(y). Output is independent of the thread
// count.
EmitSummary emit_weights(const CooccurStats& stats, const ParallelCorpus& corpus,
                         const WeightSchedule& schedule, std::ostream& out,
                         const EmitOptions& options = {});

// key=value lines
void print_summary(const EmitSummary& summary, std::ostream& out);

// Reads a weight file and checks it against the corpus: one line per pair,
// one field per target token. Throws ParseError naming the first bad line.
std::vector<std::vector<double>> read_weights(std::istream& in, const ParallelCorpus& corpus);

}  // namespace bmikit
