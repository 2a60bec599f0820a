#include "bmikit/weights.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "bmikit/errors.hpp"
#include "bmikit/format.hpp"
#include "bmikit/parallel.hpp"

namespace bmikit {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

struct Block {
  std::string text;
  std::size_t tokens = 0;
  std::size_t zeroed = 0;
  double sum = 0.0;
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
};

constexpr std::size_t kSentencesPerBlock = 1024;

}  // namespace

void validate(const WeightSchedule& schedule) {
  std::visit(overloaded{
                 [](const BmiSchedule& s) {
                   require(std::isfinite(s.scale) && s.scale > 0, "BMI scale S must be > 0");
                   require(std::isfinite(s.base), "BMI base B must be finite");
                   require(std::isfinite(s.threshold) && s.threshold >= 0, "BMI threshold must be >= 0");
                   require(s.base + s.scale * s.threshold >= 0,
                           "B + S * threshold must be >= 0 so weights are never negative");
                 },
                 [](const ExponentialSchedule& s) {
                   require(std::isfinite(s.amplitude) && s.amplitude > 0, "amplitude A must be > 0");
                   require(std::isfinite(s.decay) && s.decay > 0, "decay T must be > 0");
                 },
                 [](const ChiSquareSchedule& s) {
                   require(std::isfinite(s.amplitude) && s.amplitude > 0, "amplitude A must be > 0");
                   require(std::isfinite(s.decay) && s.decay > 0, "decay T must be > 0");
                 },
             },
             schedule);
}

std::string describe(const WeightSchedule& schedule) {
  std::ostringstream out;
  std::visit(overloaded{
                 [&](const BmiSchedule& s) {
                   out << "bmi(S=" << s.scale << ",B=" << s.base << ",threshold=" << s.threshold << ")";
                 },
                 [&](const ExponentialSchedule& s) { out << "exp(A=" << s.amplitude << ",T=" << s.decay << ")"; },
                 [&](const ChiSquareSchedule& s) { out << "chi2(A=" << s.amplitude << ",T=" << s.decay << ")"; },
             },
             schedule);
  return out.str();
}

double weight_bmi(double bmi, const BmiSchedule& schedule) {
  if (bmi < schedule.threshold) return 0.0;
  return std::max(0.0, schedule.scale * bmi + schedule.base);
}

double weight_exponential(std::uint64_t count, const ExponentialSchedule& schedule) {
  return schedule.amplitude * std::exp(-schedule.decay * static_cast<double>(count)) + 1.0;
}

double weight_chisquare(std::uint64_t count, const ChiSquareSchedule& schedule) {
  const double c = static_cast<double>(count);
  return schedule.amplitude * c * c * std::exp(-schedule.decay * c) + 1.0;
}

EmitSummary emit_weights(const CooccurStats& stats, const ParallelCorpus& corpus,
                         const WeightSchedule& schedule, std::ostream& out, const EmitOptions& options) {
  validate(schedule);
  require_aligned_vocabs(stats, corpus);

  auto weights_for = [&](const SentencePair& pair, std::vector<double>& weights) {
    weights.clear();
    std::visit(overloaded{
                   [&](const BmiSchedule& s) {
                     const auto scored = score_sentence(stats, pair, options.scoring);
                     for (double v : scored.values) weights.push_back(weight_bmi(v, s));
                   },
                   [&](const ExponentialSchedule& s) {
                     for (TokenId y : pair.target) weights.push_back(weight_exponential(stats.target_count(y), s));
                   },
                   [&](const ChiSquareSchedule& s) {
                     for (TokenId y : pair.target) weights.push_back(weight_chisquare(stats.target_count(y), s));
                   },
               },
               schedule);
  };

  const std::size_t n = corpus.size();
  const std::size_t num_blocks = (n + kSentencesPerBlock - 1) / kSentencesPerBlock;
  std::vector<Block> blocks(num_blocks);
  run_tasks(num_blocks, options.threads, [&](std::size_t b) {
    Block& block = blocks[b];
    std::vector<double> weights;
    const std::size_t end = std::min(n, (b + 1) * kSentencesPerBlock);
    for (std::size_t i = b * kSentencesPerBlock; i < end; ++i) {
      weights_for(corpus[i], weights);
      for (std::size_t j = 0; j < weights.size(); ++j) {
        if (j) block.text.push_back('\t');
        append_fixed(block.text, weights[j]);
        block.sum += weights[j];
        block.min = std::min(block.min, weights[j]);
        block.max = std::max(block.max, weights[j]);
        if (weights[j] == 0.0) ++block.zeroed;
      }
      block.text.push_back('\n');
      block.tokens += weights.size();
    }
  });

  EmitSummary summary;
  summary.pairs = n;
  double sum = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& block : blocks) {
    out << block.text;
    summary.tokens += block.tokens;
    summary.zeroed += block.zeroed;
    sum += block.sum;
    lo = std::min(lo, block.min);
    hi = std::max(hi, block.max);
  }
  if (!out) throw Error("failed writing weight file");
  if (summary.tokens > 0) {
    summary.mean = sum / static_cast<double>(summary.tokens);
    summary.min = lo;
    summary.max = hi;
  }
  return summary;
}

void print_summary(const EmitSummary& summary, std::ostream& out) {
  out << "pairs=" << summary.pairs << '\n'
      << "tokens=" << summary.tokens << '\n'
      << "zeroed=" << summary.zeroed << '\n'
      << "mean=" << format_fixed(summary.mean) << '\n'
      << "min=" << format_fixed(summary.min) << '\n'
      << "max=" << format_fixed(summary.max) << '\n';
}

std::vector<std::vector<double>> read_weights(std::istream& in, const ParallelCorpus& corpus) {
  std::vector<std::vector<double>> rows;
  rows.reserve(corpus.size());
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (number > corpus.size()) throw ParseError(number, "weight file has more lines than the corpus");
    std::vector<double> row;
    std::size_t pos = 0;
    for (;;) {
      const auto tab = line.find('\t', pos);
      const std::string_view field(line.data() + pos, (tab == std::string::npos ? line.size() : tab) - pos);
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value) ||
          value < 0) {
        throw ParseError(number, "invalid weight '" + std::string(field) + "'");
      }
      row.push_back(value);
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    if (row.size() != corpus[number - 1].target.size()) {
      throw ParseError(number, "expected " + std::to_string(corpus[number - 1].target.size()) + " weights, found " +
                                   std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() != corpus.size()) {
    throw ParseError(number + 1, "weight file has " + std::to_string(rows.size()) + " lines, corpus has " +
                                     std::to_string(corpus.size()));
  }
  return rows;
}

}  // namespace bmikit
