#include "bmikit/cooccur.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <string>
#include <utility>

#include "bmikit/errors.hpp"
#include "bmikit/parallel.hpp"
#include "stats_assembler.hpp"

namespace bmikit {

namespace {

using PairRun = std::vector<PairEntry>;

constexpr std::uint64_t pack(TokenId x, TokenId y) {
  return (static_cast<std::uint64_t>(x) << 32) | y;
}

bool key_less(const PairEntry& a, const PairEntry& b) {
  return pack(a.source, a.target) < pack(b.source, b.target);
}

PairRun merge_runs(const PairRun& a, const PairRun& b) {
  PairRun out;
  out.reserve(a.size() + b.size());
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    const auto ka = pack(i->source, i->target);
    const auto kb = pack(j->source, j->target);
    if (ka < kb) {
      out.push_back(*i++);
    } else if (kb < ka) {
      out.push_back(*j++);
    } else {
      out.push_back({i->source, i->target, i->count + j->count});
      ++i;
      ++j;
    }
  }
  out.insert(out.end(), i, a.end());
  out.insert(out.end(), j, b.end());
  return out;
}

// Log-structured accumulator: adjacent runs of similar size are merged as
// they arrive, keeping total merge work O(n log n).
class RunStack {
 public:
  void push(PairRun run) {
    runs_.push_back(std::move(run));
    while (runs_.size() >= 2 && runs_[runs_.size() - 2].size() <= 2 * runs_.back().size()) {
      auto merged = merge_runs(runs_[runs_.size() - 2], runs_.back());
      runs_.pop_back();
      runs_.back() = std::move(merged);
    }
  }

  PairRun collapse() && {
    if (runs_.empty()) return {};
    while (runs_.size() >= 2) {
      auto merged = merge_runs(runs_[runs_.size() - 2], runs_.back());
      runs_.pop_back();
      runs_.back() = std::move(merged);
    }
    return std::move(runs_.back());
  }

 private:
  std::vector<PairRun> runs_;
};

void sort_unique(std::vector<TokenId>& ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
}

PairRun run_length_encode(std::vector<std::uint64_t>& keys) {
  std::sort(keys.begin(), keys.end());
  PairRun run;
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t j = i + 1;
    while (j < keys.size() && keys[j] == keys[i]) ++j;
    run.push_back({static_cast<TokenId>(keys[i] >> 32), static_cast<TokenId>(keys[i] & 0xffffffffu),
                   static_cast<std::uint64_t>(j - i)});
    i = j;
  }
  return run;
}

void check_lengths(const ParallelCorpus& corpus, std::size_t begin, std::size_t end,
                   std::size_t max_length) {
  for (std::size_t i = begin; i < end; ++i) {
    const auto& pair = corpus[i];
    if (pair.source.size() > max_length || pair.target.size() > max_length) {
      throw ParseError(pair.index + 1, "sentence exceeds max length " + std::to_string(max_length));
    }
  }
}

bool compatible(const std::shared_ptr<const Vocab>& a, const std::shared_ptr<const Vocab>& b) {
  return a == b || a->extends(*b) || b->extends(*a);
}

const std::shared_ptr<const Vocab>& larger(const std::shared_ptr<const Vocab>& a,
                                           const std::shared_ptr<const Vocab>& b) {
  return a->size() >= b->size() ? a : b;
}

}  // namespace

CooccurStats::CooccurStats()
    : source_vocab_(std::make_shared<Vocab>()), target_vocab_(std::make_shared<Vocab>()) {}

CooccurStats CooccurStats::empty(std::shared_ptr<const Vocab> source_vocab,
                                 std::shared_ptr<const Vocab> target_vocab) {
  return StatsAssembler::assemble(std::move(source_vocab), std::move(target_vocab), 0, {}, {}, {});
}

std::uint64_t CooccurStats::pair_count(TokenId x, TokenId y) const {
  const PairEntry probe{x, y, 0};
  auto it = std::lower_bound(pairs_.begin(), pairs_.end(), probe, key_less);
  if (it == pairs_.end() || it->source != x || it->target != y) return 0;
  return it->count;
}

std::uint64_t CooccurStats::lookup(std::optional<TokenId> x, std::optional<TokenId> y) const {
  if (x && y) return pair_count(*x, *y);
  if (x) return source_count(*x);
  if (y) return target_count(*y);
  return num_sentences_;
}

std::size_t CooccurStats::source_entries() const {
  return static_cast<std::size_t>(
      std::count_if(source_counts_.begin(), source_counts_.end(), [](auto c) { return c > 0; }));
}

std::size_t CooccurStats::target_entries() const {
  return static_cast<std::size_t>(
      std::count_if(target_counts_.begin(), target_counts_.end(), [](auto c) { return c > 0; }));
}

bool operator==(const CooccurStats& a, const CooccurStats& b) {
  return *a.source_vocab_ == *b.source_vocab_ && *a.target_vocab_ == *b.target_vocab_ &&
         a.num_sentences_ == b.num_sentences_ && a.source_counts_ == b.source_counts_ &&
         a.target_counts_ == b.target_counts_ && a.pairs_ == b.pairs_;
}

CooccurStats build_shard_stats(const ParallelCorpus& corpus, std::size_t begin, std::size_t end,
                               const BuildOptions& options) {
  end = std::min(end, corpus.size());
  begin = std::min(begin, end);
  check_lengths(corpus, begin, end, options.max_sentence_length);

  std::vector<std::uint64_t> source_counts(corpus.source_vocab().size(), 0);
  std::vector<std::uint64_t> target_counts(corpus.target_vocab().size(), 0);
  const std::size_t chunk = std::max<std::size_t>(1, options.chunk_size);
  const std::size_t num_chunks = (end - begin + chunk - 1) / chunk;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(resolve_threads(options.threads), std::max<std::size_t>(1, num_chunks)));
  std::vector<PairRun> worker_runs(workers);

  run_workers(workers, [&](unsigned w, unsigned n) {
    RunStack stack;
    std::vector<std::uint64_t> keys;
    std::vector<TokenId> src;
    std::vector<TokenId> tgt;
    for (std::size_t c = w; c < num_chunks; c += n) {
      const std::size_t lo = begin + c * chunk;
      const std::size_t hi = std::min(end, lo + chunk);
      keys.clear();
      for (std::size_t i = lo; i < hi; ++i) {
        const auto& pair = corpus[i];
        src.assign(pair.source.begin(), pair.source.end());
        tgt.assign(pair.target.begin(), pair.target.end());
        sort_unique(src);
        sort_unique(tgt);
        for (TokenId x : src) std::atomic_ref(source_counts[x]).fetch_add(1, std::memory_order_relaxed);
        for (TokenId y : tgt) std::atomic_ref(target_counts[y]).fetch_add(1, std::memory_order_relaxed);
        for (TokenId x : src) {
          for (TokenId y : tgt) keys.push_back(pack(x, y));
        }
      }
      stack.push(run_length_encode(keys));
    }
    worker_runs[w] = std::move(stack).collapse();
  });

  PairRun pairs;
  for (auto& run : worker_runs) pairs = pairs.empty() ? std::move(run) : merge_runs(pairs, run);

  return StatsAssembler::assemble(corpus.source_vocab_ptr(), corpus.target_vocab_ptr(), end - begin,
                                  std::move(source_counts), std::move(target_counts), std::move(pairs));
}

CooccurStats build_stats(const ParallelCorpus& corpus, const BuildOptions& options) {
  if (corpus.empty()) throw ValidationError("cannot build statistics from an empty corpus");
  return build_shard_stats(corpus, 0, corpus.size(), options);
}

CooccurStats merge_stats(const CooccurStats& a, const CooccurStats& b) {
  if (!compatible(a.source_vocab_ptr(), b.source_vocab_ptr()) ||
      !compatible(a.target_vocab_ptr(), b.target_vocab_ptr())) {
    throw VocabMismatchError("cannot merge statistics built over different vocabularies");
  }
  const auto& source_vocab = larger(a.source_vocab_ptr(), b.source_vocab_ptr());
  const auto& target_vocab = larger(a.target_vocab_ptr(), b.target_vocab_ptr());

  auto sum = [](std::span<const std::uint64_t> x, std::span<const std::uint64_t> y, std::size_t n) {
    std::vector<std::uint64_t> out(n, 0);
    for (std::size_t i = 0; i < x.size(); ++i) out[i] += x[i];
    for (std::size_t i = 0; i < y.size(); ++i) out[i] += y[i];
    return out;
  };
  PairRun pa(a.pairs().begin(), a.pairs().end());
  PairRun pb(b.pairs().begin(), b.pairs().end());
  return StatsAssembler::assemble(source_vocab, target_vocab, a.num_sentences() + b.num_sentences(),
                                  sum(a.source_counts(), b.source_counts(), source_vocab->size()),
                                  sum(a.target_counts(), b.target_counts(), target_vocab->size()),
                                  merge_runs(pa, pb));
}

CooccurStats rebase(const CooccurStats& stats, const std::shared_ptr<const Vocab>& source_vocab,
                    const std::shared_ptr<const Vocab>& target_vocab) {
  auto remap_vocab = [](const Vocab& from, const std::shared_ptr<const Vocab>& onto,
                        std::vector<TokenId>& ids) -> std::shared_ptr<const Vocab> {
    ids.resize(from.size());
    bool grew = false;
    Vocab extended = *onto;
    for (TokenId id = 0; id < from.size(); ++id) {
      const auto before = extended.size();
      ids[id] = extended.intern(from.token(id));
      grew = grew || extended.size() != before;
    }
    if (!grew) return onto;
    return std::make_shared<const Vocab>(std::move(extended));
  };

  std::vector<TokenId> source_ids;
  std::vector<TokenId> target_ids;
  auto new_source = remap_vocab(stats.source_vocab(), source_vocab, source_ids);
  auto new_target = remap_vocab(stats.target_vocab(), target_vocab, target_ids);

  std::vector<std::uint64_t> source_counts(new_source->size(), 0);
  std::vector<std::uint64_t> target_counts(new_target->size(), 0);
  for (TokenId id = 0; id < stats.source_counts().size(); ++id) {
    source_counts[source_ids[id]] = stats.source_counts()[id];
  }
  for (TokenId id = 0; id < stats.target_counts().size(); ++id) {
    target_counts[target_ids[id]] = stats.target_counts()[id];
  }
  PairRun pairs;
  pairs.reserve(stats.pair_entries());
  for (const auto& e : stats.pairs()) pairs.push_back({source_ids[e.source], target_ids[e.target], e.count});
  std::sort(pairs.begin(), pairs.end(), key_less);

  return StatsAssembler::assemble(std::move(new_source), std::move(new_target), stats.num_sentences(),
                                  std::move(source_counts), std::move(target_counts), std::move(pairs));
}

bool equivalent(const CooccurStats& a, const CooccurStats& b) {
  if (a.num_sentences() != b.num_sentences()) return false;
  auto side_map = [](const Vocab& vocab, std::span<const std::uint64_t> counts) {
    std::map<std::string_view, std::uint64_t> m;
    for (TokenId id = 0; id < counts.size(); ++id) {
      if (counts[id] > 0) m.emplace(vocab.token(id), counts[id]);
    }
    return m;
  };
  auto pair_map = [](const CooccurStats& s) {
    std::map<std::pair<std::string_view, std::string_view>, std::uint64_t> m;
    for (const auto& e : s.pairs()) {
      m.emplace(std::pair{std::string_view(s.source_vocab().token(e.source)),
                          std::string_view(s.target_vocab().token(e.target))},
                e.count);
    }
    return m;
  };
  return side_map(a.source_vocab(), a.source_counts()) == side_map(b.source_vocab(), b.source_counts()) &&
         side_map(a.target_vocab(), a.target_counts()) == side_map(b.target_vocab(), b.target_counts()) &&
         pair_map(a) == pair_map(b);
}

}  // namespace bmikit
