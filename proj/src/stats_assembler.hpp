#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "bmikit/cooccur.hpp"

namespace bmikit {

// Internal construction access to CooccurStats.
class StatsAssembler {
 public:
  static CooccurStats assemble(std::shared_ptr<const Vocab> source_vocab,
                               std::shared_ptr<const Vocab> target_vocab,
                               std::uint64_t num_sentences,
                               std::vector<std::uint64_t> source_counts,
                               std::vector<std::uint64_t> target_counts,
                               std::vector<PairEntry> pairs) {
    CooccurStats stats;
    source_counts.resize(source_vocab->size(), 0);
    target_counts.resize(target_vocab->size(), 0);
    stats.source_vocab_ = std::move(source_vocab);
    stats.target_vocab_ = std::move(target_vocab);
    stats.num_sentences_ = num_sentences;
    stats.source_counts_ = std::move(source_counts);
    stats.target_counts_ = std::move(target_counts);
    stats.pairs_ = std::move(pairs);
    return stats;
  }
};

}  // namespace bmikit
