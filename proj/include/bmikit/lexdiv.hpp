#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bmikit/corpus.hpp"

namespace bmikit {

// A single text side flattened into one token sequence.
using TokenStream = std::vector<TokenId>;

// Reads a tokenized text file (one sentence per line, space separated) and
// concatenates all lines into one stream. Empty lines are skipped.
TokenStream load_token_stream(const std::filesystem::path& path, Vocab& vocab);
TokenStream read_token_stream(std::istream& in, Vocab& vocab);

// Distinct tokens / N.
double ttr(std::span<const TokenId> stream);

// Mean TTR over all N - window + 1 contiguous windows.
double mattr(std::span<const TokenId> stream, std::size_t window = 50);

// Expected per-type contribution to the TTR of a random sample of
// `sample_size` tokens drawn without replacement, with inclusion
// probabilities from the hypergeometric distribution.
double hdd(std::span<const TokenId> stream, std::size_t sample_size = 42);

// McCarthy & Jarvis factor count: N divided by the number of segments whose
// running TTR falls to `ttr_threshold`, averaged over a forward and a
// reversed pass. Throws UndefinedMetricError if a pass completes no factor
// and has no partial factor.
double mtld(std::span<const TokenId> stream, double ttr_threshold = 0.72);

struct DiversityReport {
  std::string metric;
  double value = 0.0;
  std::vector<std::pair<std::string, std::string>> params;
  std::size_t tokens = 0;
};

// `metric=<name> value=<float6> params=<k:v,...> N=<int>`
void print_report(const DiversityReport& report, std::ostream& out);

}  // namespace bmikit
