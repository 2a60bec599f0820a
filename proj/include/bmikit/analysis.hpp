#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "bmikit/cooccur.hpp"
#include "bmikit/corpus.hpp"
#include "bmikit/scoring.hpp"

namespace bmikit {

struct BucketRange {
  std::size_t size = 0;
  double min_score = 0.0;
  double max_score = 0.0;
};

struct BucketAssignment {
  std::size_t k = 0;
  std::vector<double> scores;        // average BMI per sentence, corpus order
  std::vector<std::size_t> labels;   // bucket per sentence; 0 is the lowest
  std::vector<std::size_t> order;    // sentence indices sorted by (score, index)
  std::vector<BucketRange> buckets;
};

// Sorts sentences by (average BMI, index) and cuts the order into k
// contiguous groups whose sizes differ by at most one; the first
// (N mod k) buckets take the extra sentence. Stats ids must match the
// corpus (see rebase()).
BucketAssignment bucket_by_avg_bmi(const CooccurStats& stats, const ParallelCorpus& corpus, std::size_t k,
                                   const ScoringOptions& options = {}, unsigned threads = 0);

// `index=<i> score=<float6> bucket=<b>` per sentence, corpus order.
void write_buckets(const BucketAssignment& buckets, std::ostream& out);

struct MappingEntry {
  std::string source;
  std::uint64_t pair_count = 0;
  double pmi = 0.0;
};

struct MappingReport {
  std::string target;
  std::uint64_t target_count = 0;
  std::vector<MappingEntry> entries;  // by pair_count desc, then token asc
  // pair_count of the top source token / target_count.
  double concentration = 0.0;
};

// Throws ValidationError naming the token if it is not in the stats.
MappingReport mapping_report(const CooccurStats& stats, std::string_view target_token, std::size_t top_k);

struct FrequencyEntry {
  std::string token;
  std::uint64_t count = 0;
};

// Tokens by count desc, then token asc; top_k = 0 means all.
std::vector<FrequencyEntry> frequency_table(const CooccurStats& stats, Side side, std::size_t top_k);

// Aligned text table, or tab-separated rows when `tsv`.
void write_mapping_report(const MappingReport& report, std::ostream& out, bool tsv);
void write_frequency_table(const std::vector<FrequencyEntry>& table, std::ostream& out, bool tsv);

}  // namespace bmikit
