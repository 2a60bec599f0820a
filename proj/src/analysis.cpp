#include "bmikit/analysis.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "bmikit/errors.hpp"
#include "bmikit/format.hpp"
#include "bmikit/parallel.hpp"

namespace bmikit {

BucketAssignment bucket_by_avg_bmi(const CooccurStats& stats, const ParallelCorpus& corpus, std::size_t k,
                                   const ScoringOptions& options, unsigned threads) {
  if (k < 2) throw ValidationError("bucket count k must be >= 2");
  const std::size_t n = corpus.size();
  if (k > n) {
    throw ValidationError("bucket count " + std::to_string(k) + " exceeds corpus size " + std::to_string(n));
  }
  require_aligned_vocabs(stats, corpus);

  BucketAssignment result;
  result.k = k;
  result.scores.resize(n);
  constexpr std::size_t kBlock = 1024;
  run_tasks((n + kBlock - 1) / kBlock, threads, [&](std::size_t b) {
    const std::size_t end = std::min(n, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) result.scores[i] = score_sentence(stats, corpus[i], options).average;
  });

  result.order.resize(n);
  std::iota(result.order.begin(), result.order.end(), std::size_t{0});
  std::sort(result.order.begin(), result.order.end(), [&](std::size_t a, std::size_t b) {
    if (result.scores[a] != result.scores[b]) return result.scores[a] < result.scores[b];
    return a < b;
  });

  result.labels.resize(n);
  result.buckets.resize(k);
  const std::size_t base = n / k;
  const std::size_t extra = n % k;
  std::size_t pos = 0;
  for (std::size_t b = 0; b < k; ++b) {
    const std::size_t size = base + (b < extra ? 1 : 0);
    auto& range = result.buckets[b];
    range.size = size;
    range.min_score = result.scores[result.order[pos]];
    range.max_score = result.scores[result.order[pos + size - 1]];
    for (std::size_t i = pos; i < pos + size; ++i) result.labels[result.order[i]] = b;
    pos += size;
  }
  return result;
}

void write_buckets(const BucketAssignment& buckets, std::ostream& out) {
  std::string line;
  for (std::size_t i = 0; i < buckets.scores.size(); ++i) {
    line = "index=" + std::to_string(i) + " score=";
    append_fixed(line, buckets.scores[i]);
    line += " bucket=" + std::to_string(buckets.labels[i]) + '\n';
    out << line;
  }
}

MappingReport mapping_report(const CooccurStats& stats, std::string_view target_token, std::size_t top_k) {
  const auto y = stats.target_vocab().find(target_token);
  if (!y || stats.target_count(*y) == 0) {
    throw ValidationError("unknown target token '" + std::string(target_token) + "'");
  }
  MappingReport report;
  report.target = std::string(target_token);
  report.target_count = stats.target_count(*y);
  for (const auto& e : stats.pairs()) {
    if (e.target != *y) continue;
    report.entries.push_back({stats.source_vocab().token(e.source), e.count,
                              pmi_term(stats, e.source, *y)});
  }
  std::sort(report.entries.begin(), report.entries.end(), [](const MappingEntry& a, const MappingEntry& b) {
    if (a.pair_count != b.pair_count) return a.pair_count > b.pair_count;
    return a.source < b.source;
  });
  if (top_k > 0 && report.entries.size() > top_k) report.entries.resize(top_k);
  if (!report.entries.empty()) {
    report.concentration =
        static_cast<double>(report.entries.front().pair_count) / static_cast<double>(report.target_count);
  }
  return report;
}

std::vector<FrequencyEntry> frequency_table(const CooccurStats& stats, Side side, std::size_t top_k) {
  const Vocab& vocab = side == Side::source ? stats.source_vocab() : stats.target_vocab();
  const auto counts = side == Side::source ? stats.source_counts() : stats.target_counts();
  std::vector<FrequencyEntry> table;
  for (TokenId id = 0; id < counts.size(); ++id) {
    if (counts[id] > 0) table.push_back({vocab.token(id), counts[id]});
  }
  std::sort(table.begin(), table.end(), [](const FrequencyEntry& a, const FrequencyEntry& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.token < b.token;
  });
  if (top_k > 0 && table.size() > top_k) table.resize(top_k);
  return table;
}

namespace {

void write_table(const std::vector<std::vector<std::string>>& rows, std::ostream& out, bool tsv) {
  if (rows.empty()) return;
  std::vector<std::size_t> widths(rows.front().size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  }
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (tsv) {
        if (c) out << '\t';
        out << row[c];
      } else {
        if (c) out << "  ";
        out << row[c];
        if (c + 1 < row.size()) out << std::string(widths[c] - row[c].size(), ' ');
      }
    }
    out << '\n';
  }
}

}  // namespace

void write_mapping_report(const MappingReport& report, std::ostream& out, bool tsv) {
  if (!tsv) {
    out << "target=" << report.target << " count=" << report.target_count
        << " concentration=" << format_fixed(report.concentration) << '\n';
  }
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"source", "pair_count", "pmi"});
  for (const auto& e : report.entries) {
    rows.push_back({e.source, std::to_string(e.pair_count), format_fixed(e.pmi)});
  }
  if (tsv) {
    rows.front() = {"target", "target_count", "source", "pair_count", "pmi", "concentration"};
    for (std::size_t i = 1; i < rows.size(); ++i) {
      rows[i].insert(rows[i].begin(), {report.target, std::to_string(report.target_count)});
      rows[i].push_back(format_fixed(report.concentration));
    }
  }
  write_table(rows, out, tsv);
}

void write_frequency_table(const std::vector<FrequencyEntry>& table, std::ostream& out, bool tsv) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"token", "count"});
  for (const auto& e : table) rows.push_back({e.token, std::to_string(e.count)});
  write_table(rows, out, tsv);
}

}  // namespace bmikit
