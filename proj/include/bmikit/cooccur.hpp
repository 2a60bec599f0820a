#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "bmikit/corpus.hpp"

namespace bmikit {

// One stored co-occurrence count. Entries with count 0 are never stored.
struct PairEntry {
  TokenId source = 0;
  TokenId target = 0;
  std::uint64_t count = 0;

  friend bool operator==(const PairEntry&, const PairEntry&) = default;
};

// Sentence-level document frequencies over a parallel corpus:
//   K              number of sentence pairs
//   f_src[x]       pairs whose source side contains x at least once
//   f_tgt[y]       pairs whose target side contains y at least once
//   f_pair[(x,y)]  pairs containing x on the source side and y on the target
// Repeated tokens inside one sentence are counted once. The pair table is a
// sorted array of distinct observed pairs, so its size tracks the number of
// pairs actually seen, not |V_src| * |V_tgt|.
class CooccurStats {
 public:
  CooccurStats();

  // A table with K = 0 over the given vocabularies; the identity for merge.
  static CooccurStats empty(std::shared_ptr<const Vocab> source_vocab,
                            std::shared_ptr<const Vocab> target_vocab);

  std::uint64_t num_sentences() const { return num_sentences_; }
  std::uint64_t source_count(TokenId x) const {
    return x < source_counts_.size() ? source_counts_[x] : 0;
  }
  std::uint64_t target_count(TokenId y) const {
    return y < target_counts_.size() ? target_counts_[y] : 0;
  }
  std::uint64_t pair_count(TokenId x, TokenId y) const;

  // f_src[x], f_tgt[y], or f_pair[(x,y)] depending on which ids are given;
  // K when neither is. Missing entries count as 0.
  std::uint64_t lookup(std::optional<TokenId> x, std::optional<TokenId> y) const;

  const Vocab& source_vocab() const { return *source_vocab_; }
  const Vocab& target_vocab() const { return *target_vocab_; }
  const std::shared_ptr<const Vocab>& source_vocab_ptr() const { return source_vocab_; }
  const std::shared_ptr<const Vocab>& target_vocab_ptr() const { return target_vocab_; }

  std::span<const std::uint64_t> source_counts() const { return source_counts_; }
  std::span<const std::uint64_t> target_counts() const { return target_counts_; }
  // Sorted by (source id, target id).
  std::span<const PairEntry> pairs() const { return pairs_; }

  std::size_t source_entries() const;
  std::size_t target_entries() const;
  std::size_t pair_entries() const { return pairs_.size(); }

  // Exact structural equality, including vocab id assignment.
  friend bool operator==(const CooccurStats& a, const CooccurStats& b);

 private:
  friend class StatsAssembler;

  std::shared_ptr<const Vocab> source_vocab_;
  std::shared_ptr<const Vocab> target_vocab_;
  std::uint64_t num_sentences_ = 0;
  std::vector<std::uint64_t> source_counts_;
  std::vector<std::uint64_t> target_counts_;
  std::vector<PairEntry> pairs_;
};

struct BuildOptions {
  // 0 selects std::thread::hardware_concurrency().
  unsigned threads = 0;
  // Sentences longer than this on either side are rejected.
  std::size_t max_sentence_length = 1024;
  // Sentences per counting task.
  std::size_t chunk_size = 8192;
};

// Counts the whole corpus. Throws ValidationError on an empty corpus and
// ParseError for sentences over the length guard. The result does not depend
// on the thread count.
CooccurStats build_stats(const ParallelCorpus& corpus, const BuildOptions& options = {});

// Counts pairs [begin, end) of the corpus; an empty range yields K = 0.
CooccurStats build_shard_stats(const ParallelCorpus& corpus, std::size_t begin, std::size_t end,
                               const BuildOptions& options = {});

// Element-wise sum. The vocabularies must agree (one extending the other);
// otherwise VocabMismatchError.
CooccurStats merge_stats(const CooccurStats& a, const CooccurStats& b);

// Re-expresses `stats` over the given vocabularies: every token they contain
// keeps its id there, and tokens only known to `stats` are appended after.
CooccurStats rebase(const CooccurStats& stats, const std::shared_ptr<const Vocab>& source_vocab,
                    const std::shared_ptr<const Vocab>& target_vocab);

// Equality of counts keyed by token strings, ignoring id assignment.
bool equivalent(const CooccurStats& a, const CooccurStats& b);

// Versioned line format:
//   BMISTATS\t1
//   K\t<count>
//   S\t<source-token>\t<count>            (sorted by token)
//   T\t<target-token>\t<count>            (sorted by token)
//   P\t<source-token>\t<target-token>\t<count>   (sorted by token pair)
void write_stats(const CooccurStats& stats, std::ostream& out);
CooccurStats read_stats(std::istream& in);
CooccurStats read_stats(const std::filesystem::path& path);

}  // namespace bmikit
