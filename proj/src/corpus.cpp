#include "bmikit/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <tuple>

#include "bmikit/errors.hpp"

namespace bmikit {

namespace {

bool is_trailing_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::string_view strip_trailing(std::string_view line) {
  while (!line.empty() && is_trailing_space(line.back())) line.remove_suffix(1);
  return line;
}

std::string_view side_name(Side side) { return side == Side::source ? "source" : "target"; }

// Reads '\n'-terminated lines and tracks the byte offset of each line start.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next() {
    offset_ = next_offset_;
    if (!std::getline(in_, line_)) return false;
    ++number_;
    next_offset_ += line_.size() + (in_.eof() ? 0 : 1);
    return true;
  }

  const std::string& line() const { return line_; }
  std::size_t number() const { return number_; }
  std::size_t offset() const { return offset_; }

 private:
  std::istream& in_;
  std::string line_;
  std::size_t number_ = 0;
  std::size_t offset_ = 0;
  std::size_t next_offset_ = 0;
};

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

void check_line(const LineReader& reader, Side side) {
  if (auto bad = find_invalid_utf8(reader.line())) throw EncodingError(reader.offset() + *bad);
  if (strip_trailing(reader.line()).find_first_not_of(' ') == std::string_view::npos) {
    throw ParseError(reader.number(), std::string("empty ") + std::string(side_name(side)) + " line");
  }
}

}  // namespace

TokenId Vocab::intern(std::string_view token) {
  if (token.empty()) throw ValidationError("cannot intern an empty token");
  if (auto it = ids_.find(token); it != ids_.end()) return it->second;
  const auto id = static_cast<TokenId>(tokens_.size());
  tokens_.emplace_back(token);
  ids_.emplace(tokens_.back(), id);
  return id;
}

std::optional<TokenId> Vocab::find(std::string_view token) const {
  if (auto it = ids_.find(token); it != ids_.end()) return it->second;
  return std::nullopt;
}

bool Vocab::extends(const Vocab& other) const {
  if (other.size() > size()) return false;
  return std::equal(other.tokens_.begin(), other.tokens_.end(), tokens_.begin());
}

ParallelCorpus::ParallelCorpus(std::shared_ptr<const Vocab> source_vocab,
                               std::shared_ptr<const Vocab> target_vocab,
                               std::vector<SentencePair> pairs)
    : source_vocab_(std::move(source_vocab)),
      target_vocab_(std::move(target_vocab)),
      pairs_(std::move(pairs)) {}

CorpusBuilder::CorpusBuilder()
    : source_vocab_(std::make_shared<Vocab>()), target_vocab_(std::make_shared<Vocab>()) {}

void CorpusBuilder::add(std::string_view source_line, std::string_view target_line) {
  const std::size_t line_number = pairs_.size() + 1;
  const auto source_tokens = split_tokens(source_line, line_number);
  const auto target_tokens = split_tokens(target_line, line_number);
  if (source_tokens.empty()) throw ParseError(line_number, "empty source line");
  if (target_tokens.empty()) throw ParseError(line_number, "empty target line");

  SentencePair pair;
  pair.index = pairs_.size();
  pair.source.reserve(source_tokens.size());
  pair.target.reserve(target_tokens.size());
  for (auto tok : source_tokens) pair.source.push_back(source_vocab_->intern(tok));
  for (auto tok : target_tokens) pair.target.push_back(target_vocab_->intern(tok));
  pairs_.push_back(std::move(pair));
}

ParallelCorpus CorpusBuilder::finish() && {
  return ParallelCorpus(std::move(source_vocab_), std::move(target_vocab_), std::move(pairs_));
}

std::vector<std::string_view> split_tokens(std::string_view line, std::size_t line_number) {
  line = strip_trailing(line);
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const auto end = std::min(line.find(' ', pos), line.size());
    if (end > pos) {
      auto tok = line.substr(pos, end - pos);
      if (tok.find_first_of("\t\r\v\f\n") != std::string_view::npos) {
        throw ParseError(line_number, "token contains tab or control whitespace");
      }
      tokens.push_back(tok);
    }
    pos = end + 1;
  }
  return tokens;
}

std::optional<std::size_t> find_invalid_utf8(std::string_view bytes) {
  const auto* s = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t n = bytes.size();
  std::size_t i = 0;
  while (i < n) {
    const unsigned char c = s[i];
    if (c < 0x80) {
      ++i;
      continue;
    }
    std::size_t len = 0;
    unsigned char lo = 0x80, hi = 0xBF;
    if (c >= 0xC2 && c <= 0xDF) {
      len = 2;
    } else if (c >= 0xE0 && c <= 0xEF) {
      len = 3;
      if (c == 0xE0) lo = 0xA0;
      if (c == 0xED) hi = 0x9F;  // no surrogates
    } else if (c >= 0xF0 && c <= 0xF4) {
      len = 4;
      if (c == 0xF0) lo = 0x90;
      if (c == 0xF4) hi = 0x8F;
    } else {
      return i;
    }
    if (i + len > n) return i;
    if (s[i + 1] < lo || s[i + 1] > hi) return i + 1;
    for (std::size_t k = 2; k < len; ++k) {
      if (s[i + k] < 0x80 || s[i + k] > 0xBF) return i + k;
    }
    i += len;
  }
  return std::nullopt;
}

ParallelCorpus read_parallel_corpus(std::istream& source, std::istream& target) {
  LineReader src(source);
  LineReader tgt(target);
  CorpusBuilder builder;
  for (;;) {
    const bool has_src = src.next();
    const bool has_tgt = tgt.next();
    if (!has_src || !has_tgt) {
      if (has_src || has_tgt) {
        while (src.next()) {}
        while (tgt.next()) {}
        throw AlignmentError(src.number(), tgt.number());
      }
      break;
    }
    check_line(src, Side::source);
    check_line(tgt, Side::target);
    builder.add(src.line(), tgt.line());
  }
  return std::move(builder).finish();
}

ParallelCorpus load_parallel_corpus(const std::filesystem::path& source_path,
                                    const std::filesystem::path& target_path) {
  auto source = open_input(source_path);
  auto target = open_input(target_path);
  return read_parallel_corpus(source, target);
}

void write_side(const ParallelCorpus& corpus, Side side, std::ostream& out) {
  const Vocab& vocab = corpus.vocab(side);
  for (const auto& pair : corpus.pairs()) {
    const auto& ids = side == Side::source ? pair.source : pair.target;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i) out << ' ';
      out << vocab.token(ids[i]);
    }
    out << '\n';
  }
}

AlignmentReport validate_alignment(const std::filesystem::path& source_path,
                                   const std::filesystem::path& target_path) {
  AlignmentReport report;
  auto scan = [&report](const std::filesystem::path& path, Side side) {
    auto in = open_input(path);
    LineReader reader(in);
    std::size_t max_length = 0;
    while (reader.next()) {
      if (auto bad = find_invalid_utf8(reader.line())) {
        report.violations.push_back({AlignmentViolation::Kind::invalid_utf8, side, reader.number(),
                                     "byte offset " + std::to_string(reader.offset() + *bad)});
        continue;
      }
      std::size_t length = 0;
      try {
        length = split_tokens(reader.line(), reader.number()).size();
      } catch (const ParseError& e) {
        report.violations.push_back({AlignmentViolation::Kind::bad_token, side, reader.number(), e.what()});
        continue;
      }
      if (length == 0) {
        report.violations.push_back({AlignmentViolation::Kind::empty_line, side, reader.number(), ""});
      }
      max_length = std::max(max_length, length);
    }
    if (in.bad()) throw Error("read failure on " + path.string());
    return std::pair{reader.number(), max_length};
  };

  std::tie(report.source_lines, report.max_source_length) = scan(source_path, Side::source);
  std::tie(report.target_lines, report.max_target_length) = scan(target_path, Side::target);
  report.pairs = std::min(report.source_lines, report.target_lines);
  if (report.source_lines != report.target_lines) {
    report.violations.push_back({AlignmentViolation::Kind::count_mismatch, Side::source, 0,
                                 "source " + std::to_string(report.source_lines) + " vs target " +
                                     std::to_string(report.target_lines)});
  }
  return report;
}

std::string_view to_string(AlignmentViolation::Kind kind) {
  switch (kind) {
    case AlignmentViolation::Kind::count_mismatch: return "count-mismatch";
    case AlignmentViolation::Kind::empty_line: return "empty";
    case AlignmentViolation::Kind::invalid_utf8: return "invalid-utf8";
    case AlignmentViolation::Kind::bad_token: return "bad-token";
  }
  return "unknown";
}

}  // namespace bmikit
