#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>

#include "bmikit/cooccur.hpp"
#include "bmikit/errors.hpp"
#include "stats_assembler.hpp"

namespace bmikit {

namespace {

constexpr std::string_view kMagic = "BMISTATS";
constexpr std::string_view kVersion = "1";

// rank[id] = position of the token in byte-wise sorted order.
std::vector<std::uint32_t> sorted_ranks(const Vocab& vocab, std::vector<TokenId>& order) {
  order.resize(vocab.size());
  std::iota(order.begin(), order.end(), TokenId{0});
  std::sort(order.begin(), order.end(),
            [&](TokenId a, TokenId b) { return vocab.token(a) < vocab.token(b); });
  std::vector<std::uint32_t> rank(vocab.size());
  for (std::uint32_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
  return rank;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  for (;;) {
    const auto tab = line.find('\t', pos);
    fields.push_back(line.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos));
    if (tab == std::string_view::npos) return fields;
    pos = tab + 1;
  }
}

std::uint64_t parse_count(std::string_view field, std::size_t line) {
  std::uint64_t value = 0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(line, "invalid count '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

void write_stats(const CooccurStats& stats, std::ostream& out) {
  std::vector<TokenId> source_order;
  std::vector<TokenId> target_order;
  const auto source_rank = sorted_ranks(stats.source_vocab(), source_order);
  const auto target_rank = sorted_ranks(stats.target_vocab(), target_order);

  out << kMagic << '\t' << kVersion << '\n';
  out << "K\t" << stats.num_sentences() << '\n';
  for (TokenId id : source_order) {
    if (auto c = stats.source_count(id)) out << "S\t" << stats.source_vocab().token(id) << '\t' << c << '\n';
  }
  for (TokenId id : target_order) {
    if (auto c = stats.target_count(id)) out << "T\t" << stats.target_vocab().token(id) << '\t' << c << '\n';
  }
  std::vector<PairEntry> pairs(stats.pairs().begin(), stats.pairs().end());
  std::sort(pairs.begin(), pairs.end(), [&](const PairEntry& a, const PairEntry& b) {
    return std::pair{source_rank[a.source], target_rank[a.target]} <
           std::pair{source_rank[b.source], target_rank[b.target]};
  });
  for (const auto& e : pairs) {
    out << "P\t" << stats.source_vocab().token(e.source) << '\t' << stats.target_vocab().token(e.target)
        << '\t' << e.count << '\n';
  }
}

CooccurStats read_stats(std::istream& in) {
  std::string line;
  std::size_t number = 0;
  auto next = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++number;
    return true;
  };

  if (!next()) throw ParseError(1, "missing header");
  {
    const auto fields = split_tabs(line);
    if (fields.size() != 2 || fields[0] != kMagic) throw ParseError(number, "not a stats file");
    if (fields[1] != kVersion) {
      throw ParseError(number, "unsupported stats version '" + std::string(fields[1]) + "' (expected " +
                                   std::string(kVersion) + ")");
    }
  }
  if (!next()) throw ParseError(2, "missing K line");
  std::uint64_t num_sentences = 0;
  {
    const auto fields = split_tabs(line);
    if (fields.size() != 2 || fields[0] != "K") throw ParseError(number, "expected K line");
    num_sentences = parse_count(fields[1], number);
  }

  auto source_vocab = std::make_shared<Vocab>();
  auto target_vocab = std::make_shared<Vocab>();
  std::vector<std::uint64_t> source_counts;
  std::vector<std::uint64_t> target_counts;
  std::vector<PairEntry> pairs;

  // Records must appear as S*, T*, P*, each block strictly ascending.
  int section = 0;
  std::string last_source;
  std::string last_target;
  std::pair<std::string, std::string> last_pair;
  while (next()) {
    const auto fields = split_tabs(line);
    const std::string_view tag = fields[0];
    if (tag == "S" || tag == "T") {
      const int this_section = tag == "S" ? 1 : 2;
      if (fields.size() != 3 || fields[1].empty()) throw ParseError(number, "malformed record");
      if (this_section < section) throw ParseError(number, "record out of order");
      const std::uint64_t count = parse_count(fields[2], number);
      if (count == 0 || count > num_sentences) throw ParseError(number, "count outside [1, K]");
      auto& last = this_section == 1 ? last_source : last_target;
      if (this_section == section && !(last < fields[1])) throw ParseError(number, "tokens not strictly sorted");
      last.assign(fields[1]);
      section = this_section;
      auto& vocab = this_section == 1 ? *source_vocab : *target_vocab;
      auto& counts = this_section == 1 ? source_counts : target_counts;
      vocab.intern(fields[1]);
      counts.push_back(count);
    } else if (tag == "P") {
      if (fields.size() != 4 || fields[1].empty() || fields[2].empty()) throw ParseError(number, "malformed record");
      const std::uint64_t count = parse_count(fields[3], number);
      auto key = std::pair{std::string(fields[1]), std::string(fields[2])};
      if (section == 3 && !(last_pair < key)) throw ParseError(number, "pairs not strictly sorted");
      section = 3;
      const auto x = source_vocab->find(fields[1]);
      const auto y = target_vocab->find(fields[2]);
      if (!x || !y) throw ParseError(number, "pair references unknown token");
      if (count == 0 || count > std::min(source_counts[*x], target_counts[*y])) {
        throw ParseError(number, "pair count outside [1, min(f(x), f(y))]");
      }
      pairs.push_back({*x, *y, count});
      last_pair = std::move(key);
    } else {
      throw ParseError(number, "unknown record tag '" + std::string(tag) + "'");
    }
  }
  if (in.bad()) throw Error("read failure on stats file");

  // Tokens are sorted in the file, so ids follow token order and the pair
  // list is already sorted by (source id, target id).
  return StatsAssembler::assemble(std::move(source_vocab), std::move(target_vocab), num_sentences,
                                  std::move(source_counts), std::move(target_counts), std::move(pairs));
}

CooccurStats read_stats(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_stats(in);
}

}  // namespace bmikit
