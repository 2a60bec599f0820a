#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bmikit/cooccur.hpp"
#include "bmikit/corpus.hpp"

namespace bmikit {

// How a summand with f(x,y) = 0 is treated. The log ratio is undefined
// there; `skip` contributes 0, `floor` contributes `floor_value`.
enum class ZeroPolicy { skip, floor };

struct ScoringOptions {
  ZeroPolicy zero_policy = ZeroPolicy::skip;
  double floor_value = -1.0;
  // Sum each distinct source token once. When false, repeated source tokens
  // contribute once per occurrence.
  bool deduplicate_source = true;
};

// ln( f(x,y) / (f(x) * f(y) / K) ) in nats, from raw counts. Returns 0 when
// any count is zero.
double pmi_from_counts(std::uint64_t source_count, std::uint64_t target_count,
                       std::uint64_t pair_count, std::uint64_t num_sentences);

// One summand of the bilingual mutual information sum. Tokens unseen in
// `stats` always contribute 0; observed tokens that never co-occur follow
// the zero policy.
double pmi_term(const CooccurStats& stats, TokenId x, TokenId y, const ScoringOptions& options = {});

// BMI(x, y) = sum over source tokens x_i of pmi_term(x_i, y).
double score_token(const CooccurStats& stats, std::span<const TokenId> source, TokenId y,
                   const ScoringOptions& options = {});

struct SentenceBmi {
  std::size_t index = 0;
  std::vector<double> values;  // one per target position
  double average = 0.0;
};

// Ids in `pair` must be ids of the stats vocabularies.
SentenceBmi score_sentence(const CooccurStats& stats, const SentencePair& pair,
                           const ScoringOptions& options = {});

// Throws VocabMismatchError unless the stats vocabularies extend the corpus
// vocabularies (see rebase()).
void require_aligned_vocabs(const CooccurStats& stats, const ParallelCorpus& corpus);

}  // namespace bmikit
