#include "bmikit/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "bmikit/errors.hpp"

namespace bmikit {

double pmi_from_counts(std::uint64_t source_count, std::uint64_t target_count,
                       std::uint64_t pair_count, std::uint64_t num_sentences) {
  if (pair_count == 0 || source_count == 0 || target_count == 0 || num_sentences == 0) return 0.0;
  // f(x,y) * K / (f(x) * f(y)); scaling every count by the same factor leaves
  // the ratio unchanged.
  const double joint = static_cast<double>(pair_count) * static_cast<double>(num_sentences);
  const double independent = static_cast<double>(source_count) * static_cast<double>(target_count);
  return std::log(joint / independent);
}

double pmi_term(const CooccurStats& stats, TokenId x, TokenId y, const ScoringOptions& options) {
  const auto fx = stats.source_count(x);
  const auto fy = stats.target_count(y);
  if (fx == 0 || fy == 0) return 0.0;
  const auto fxy = stats.pair_count(x, y);
  if (fxy == 0) return options.zero_policy == ZeroPolicy::floor ? options.floor_value : 0.0;
  return pmi_from_counts(fx, fy, fxy, stats.num_sentences());
}

double score_token(const CooccurStats& stats, std::span<const TokenId> source, TokenId y,
                   const ScoringOptions& options) {
  double sum = 0.0;
  if (!options.deduplicate_source) {
    for (TokenId x : source) sum += pmi_term(stats, x, y, options);
    return sum;
  }
  std::vector<TokenId> distinct(source.begin(), source.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  for (TokenId x : distinct) sum += pmi_term(stats, x, y, options);
  return sum;
}

SentenceBmi score_sentence(const CooccurStats& stats, const SentencePair& pair,
                           const ScoringOptions& options) {
  SentenceBmi result;
  result.index = pair.index;
  result.values.reserve(pair.target.size());

  std::vector<TokenId> source(pair.source.begin(), pair.source.end());
  ScoringOptions inner = options;
  if (options.deduplicate_source) {
    std::sort(source.begin(), source.end());
    source.erase(std::unique(source.begin(), source.end()), source.end());
    inner.deduplicate_source = false;  // already distinct
  }
  double sum = 0.0;
  for (TokenId y : pair.target) {
    const double value = score_token(stats, source, y, inner);
    result.values.push_back(value);
    sum += value;
  }
  if (!result.values.empty()) result.average = sum / static_cast<double>(result.values.size());
  return result;
}

void require_aligned_vocabs(const CooccurStats& stats, const ParallelCorpus& corpus) {
  if (!stats.source_vocab().extends(corpus.source_vocab()) ||
      !stats.target_vocab().extends(corpus.target_vocab())) {
    throw VocabMismatchError("statistics vocabulary does not match the corpus; rebase the stats first");
  }
}

}  // namespace bmikit
